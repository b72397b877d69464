#include "genflow/dataset.hpp"

#include "genflow/error.hpp"
#include "genflow/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace genflow {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_record(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            cells.emplace_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.emplace_back(trim(cell));
    return cells;
}

std::optional<double> parse_real(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return std::nullopt;
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::size_t resolve_label_column(const std::vector<std::string>& header,
                                 const std::string& label_column) {
    if (label_column.empty()) throw DataError("no label column given");
    const auto it = std::find(header.begin(), header.end(), label_column);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    std::size_t index = 0;
    const auto [end, ec] =
        std::from_chars(label_column.data(), label_column.data() + label_column.size(), index);
    if (ec == std::errc{} && end == label_column.data() + label_column.size() &&
        index < header.size()) {
        return index;
    }
    throw DataError("label column '" + label_column + "' not found in header");
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> row_ids) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(row_ids.size()), features.cols());
    out.labels.reserve(row_ids.size());
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) =
            features.row(static_cast<Eigen::Index>(row_ids[i]));
        out.labels.push_back(labels[row_ids[i]]);
    }
    out.feature_names = feature_names;
    out.class_names = class_names;
    out.source_id = source_id;
    return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> col_ids) const {
    Dataset out;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(col_ids.size()));
    for (std::size_t j = 0; j < col_ids.size(); ++j) {
        if (col_ids[j] >= cols()) throw DataError("column index out of range");
        out.features.col(static_cast<Eigen::Index>(j)) =
            features.col(static_cast<Eigen::Index>(col_ids[j]));
        out.feature_names.push_back(feature_names[col_ids[j]]);
    }
    out.labels = labels;
    out.class_names = class_names;
    out.source_id = source_id;
    return out;
}

void validate(const Dataset& data, bool require_all_classes) {
    const auto n = data.rows();
    if (static_cast<std::size_t>(data.features.rows()) != n) {
        throw DataError("feature matrix has " + std::to_string(data.features.rows()) +
                        " rows but there are " + std::to_string(n) + " labels");
    }
    if (static_cast<std::size_t>(data.features.cols()) != data.feature_names.size()) {
        throw DataError("feature matrix width does not match feature_names");
    }
    if (n < 2) throw DataError("dataset needs at least 2 samples");
    if (data.cols() < 1) throw DataError("dataset needs at least 1 feature");
    if (data.num_classes() < 2) throw DataError("dataset needs at least 2 classes");
    if (!data.features.allFinite()) throw DataError("dataset contains non-finite feature values");
    for (int y : data.labels) {
        if (y < 0 || y >= data.num_classes()) {
            throw DataError("label " + std::to_string(y) + " outside 0.." +
                            std::to_string(data.num_classes() - 1));
        }
    }
    if (require_all_classes) {
        const auto counts = data.class_counts();
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] == 0) {
                throw DataError("class '" + data.class_names[c] + "' has no samples");
            }
        }
    }
}

Dataset make_dataset(Matrix features, std::vector<int> labels,
                     std::vector<std::string> feature_names,
                     std::vector<std::string> class_names, std::string source_id) {
    Dataset data{std::move(features), std::move(labels), std::move(feature_names),
                 std::move(class_names), std::move(source_id)};
    validate(data);
    return data;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options,
                     LoadSummary* summary) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path.string() + "'");

    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            header = split_record(line, options.delimiter);
            break;
        }
    }
    if (header.empty()) throw DataError("data file '" + path.string() + "' is empty");
    const std::size_t label_col = resolve_label_column(header, options.label_column);

    std::vector<std::string> feature_names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_col) feature_names.push_back(header[j]);
    }
    const std::size_t d = feature_names.size();

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::size_t dropped = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_record(line, options.delimiter);
        if (cells.size() != header.size()) {
            throw DataError(path.filename().string() + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(d);
        bool bad = false;
        for (std::size_t j = 0; j < cells.size() && !bad; ++j) {
            if (j == label_col) {
                bad = cells[j].empty();
                continue;
            }
            const auto v = parse_real(cells[j]);
            if (!v) {
                if (options.na_policy == NaPolicy::fail) {
                    throw DataError(path.filename().string() + ":" + std::to_string(line_no) +
                                    ": cannot parse '" + cells[j] + "' in column '" +
                                    header[j] + "'");
                }
                bad = true;
            } else {
                row.push_back(*v);
            }
        }
        if (bad) {
            if (options.na_policy == NaPolicy::fail) {
                throw DataError(path.filename().string() + ":" + std::to_string(line_no) +
                                ": empty label");
            }
            ++dropped;
            continue;
        }
        values.insert(values.end(), row.begin(), row.end());
        raw_labels.push_back(cells[label_col]);
    }

    // Dense label ids in ascending raw order.
    bool numeric = true;
    for (const auto& raw : raw_labels) {
        if (!parse_real(raw)) {
            numeric = false;
            break;
        }
    }
    std::vector<std::string> class_names;
    std::vector<int> labels(raw_labels.size());
    if (numeric) {
        std::map<double, int> ids;
        std::map<double, std::string> first_token;
        for (const auto& raw : raw_labels) first_token.emplace(*parse_real(raw), raw);
        for (const auto& [value, token] : first_token) {
            ids.emplace(value, static_cast<int>(class_names.size()));
            class_names.push_back(token);
        }
        for (std::size_t i = 0; i < raw_labels.size(); ++i) {
            labels[i] = ids.at(*parse_real(raw_labels[i]));
        }
    } else {
        std::map<std::string, int> ids;
        for (const auto& raw : raw_labels) ids.emplace(raw, 0);
        for (auto& [token, id] : ids) {
            id = static_cast<int>(class_names.size());
            class_names.push_back(token);
        }
        for (std::size_t i = 0; i < raw_labels.size(); ++i) labels[i] = ids.at(raw_labels[i]);
    }
    if (class_names.size() < 2) {
        throw DataError("label column '" + header[label_col] + "' has fewer than 2 distinct values");
    }

    const auto n = static_cast<Eigen::Index>(raw_labels.size());
    Matrix features(n, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
            features(i, j) = values[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
        }
    }
    Dataset data = make_dataset(std::move(features), std::move(labels), std::move(feature_names),
                                std::move(class_names), path.filename().string());
    if (summary) {
        summary->rows = data.rows();
        summary->dropped_rows = dropped;
        summary->features = data.cols();
        summary->class_counts = data.class_counts();
    }
    return data;
}

std::size_t stratified_train_count(std::size_t class_size, double fraction) {
    if (class_size < 2) throw DataError("a class needs at least 2 samples to be split");
    // Small epsilon so exact halves (e.g. 0.3 * 5) round up despite binary representation.
    auto count = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(class_size) + 0.5 + 1e-9));
    return std::clamp<std::size_t>(count, 1, class_size - 1);
}

SplitPair stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0, 1)");
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.num_classes()));
    for (std::size_t i = 0; i < data.rows(); ++i) {
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);
    }
    SplitPair split;
    split.seed = seed;
    split.train_fraction = train_fraction;
    Rng rng(seed);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& rows = by_class[c];
        if (rows.size() < 2) {
            throw DataError("class '" + data.class_names[c] + "' has " +
                            std::to_string(rows.size()) + " sample(s); need at least 2 to split");
        }
        rng.shuffle(std::span(rows));
        const std::size_t take = stratified_train_count(rows.size(), train_fraction);
        split.train_rows.insert(split.train_rows.end(), rows.begin(), rows.begin() + take);
        split.test_rows.insert(split.test_rows.end(), rows.begin() + take, rows.end());
    }
    std::sort(split.train_rows.begin(), split.train_rows.end());
    std::sort(split.test_rows.begin(), split.test_rows.end());
    split.train = data.subset(split.train_rows);
    split.test = data.subset(split.test_rows);
    if (split.train.rows() <= data.cols()) {
        split.warnings.push_back("training split has " + std::to_string(split.train.rows()) +
                                 " rows, not more than the " + std::to_string(data.cols()) +
                                 " features");
    }
    return split;
}

std::vector<int> encode_sign_labels(const Dataset& data) {
    if (data.num_classes() != 2) {
        throw DataError("sign encoding needs a binary dataset, got " +
                        std::to_string(data.num_classes()) + " classes");
    }
    std::vector<int> signs(data.rows());
    std::transform(data.labels.begin(), data.labels.end(), signs.begin(),
                   [](int y) { return y == 1 ? 1 : -1; });
    return signs;
}

std::vector<int> decode_sign_labels(std::span<const int> signs) {
    std::vector<int> labels(signs.size());
    std::transform(signs.begin(), signs.end(), labels.begin(), [](int s) {
        if (s != 1 && s != -1) throw DataError("sign label must be -1 or +1");
        return s == 1 ? 1 : 0;
    });
    return labels;
}

Dataset binarize(const Dataset& data, std::span<const int> positive,
                 std::span<const int> negative, std::string positive_name,
                 std::string negative_name) {
    if (positive.empty() || negative.empty()) throw DataError("binarize: empty label set");
    std::vector<int> role(static_cast<std::size_t>(data.num_classes()), -1);
    for (int c : positive) {
        if (c < 0 || c >= data.num_classes()) throw DataError("binarize: label out of range");
        role[static_cast<std::size_t>(c)] = 1;
    }
    for (int c : negative) {
        if (c < 0 || c >= data.num_classes()) throw DataError("binarize: label out of range");
        if (role[static_cast<std::size_t>(c)] == 1) {
            throw DataError("binarize: label " + std::to_string(c) + " is in both sets");
        }
        role[static_cast<std::size_t>(c)] = 0;
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        if (role[static_cast<std::size_t>(data.labels[i])] >= 0) keep.push_back(i);
    }
    Dataset out = data.subset(keep);
    for (auto& y : out.labels) y = role[static_cast<std::size_t>(y)];
    out.class_names = {std::move(negative_name), std::move(positive_name)};
    return out;
}

}  // namespace genflow
