#include "genflow/error.hpp"
#include "genflow/flow.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace genflow {

HierarchySpec parse_hierarchy(std::string_view text) {
    using nlohmann::json;
    HierarchySpec spec;
    try {
        const json doc = json::parse(text);
        const json& levels = doc.is_object() ? doc.at("levels") : doc;
        if (!levels.is_array()) throw ConfigError("hierarchy: expected a list of levels");
        for (const auto& entry : levels) {
            HierarchyLevel level;
            level.name = entry.value("name", "level " + std::to_string(spec.levels.size() + 1));
            level.positive = entry.at("positive").get<std::vector<int>>();
            level.negative = entry.at("negative").get<std::vector<int>>();
            spec.levels.push_back(std::move(level));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("hierarchy file: ") + e.what());
    }
    if (spec.levels.empty()) throw ConfigError("hierarchy file has no levels");
    return spec;
}

HierarchySpec load_hierarchy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read hierarchy file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_hierarchy(text.str());
}

void validate_hierarchy(const HierarchySpec& spec, int num_classes) {
    if (spec.levels.empty()) throw ConfigError("hierarchy has no levels");
    for (const auto& level : spec.levels) {
        if (level.positive.empty() || level.negative.empty()) {
            throw ConfigError("hierarchy level '" + level.name + "' has an empty side");
        }
        std::set<int> seen;
        for (const auto* side : {&level.positive, &level.negative}) {
            for (int c : *side) {
                if (c < 0 || c >= num_classes) {
                    throw ConfigError("hierarchy level '" + level.name + "': class id " +
                                      std::to_string(c) + " outside 0.." +
                                      std::to_string(num_classes - 1));
                }
                if (!seen.insert(c).second) {
                    throw ConfigError("hierarchy level '" + level.name + "': class id " +
                                      std::to_string(c) + " listed twice");
                }
            }
        }
    }
}

Rates combine_levels(std::span<const Rates> levels) {
    Rates out;
    if (levels.empty()) return out;
    for (const auto& r : levels) {
        out.precision += r.precision;
        out.recall += r.recall;
        out.accuracy += r.accuracy;
    }
    const auto n = static_cast<double>(levels.size());
    out.precision /= n;
    out.recall /= n;
    out.accuracy /= n;
    return out;
}

}  // namespace genflow
