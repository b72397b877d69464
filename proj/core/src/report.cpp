#include "genflow/report.hpp"

#include "genflow/error.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace genflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json rates_json(const Rates& r) {
    return {{"precision", r.precision}, {"recall", r.recall}, {"accuracy", r.accuracy}};
}

json metrics_json(const EvalMetrics& m) {
    json per_class = json::array();
    for (const auto& r : m.per_class) per_class.push_back(rates_json(r));
    json out = {
        {"per_class", per_class},
        {"support", m.support},
        {"micro", rates_json(m.micro)},
        {"macro", rates_json(m.macro)},
        {"overall_accuracy", m.overall_accuracy},
        {"flags", m.flags},
    };
    if (m.per_class.size() == 2) out["positive"] = rates_json(m.positive);
    if (m.auc) out["auc"] = *m.auc;
    if (!m.roc.empty()) out["roc_points"] = m.roc.size();
    return out;
}

json params_json(const Hyperparameters& p) {
    json out = json::object();
    for (const auto& [k, v] : p) out[k] = v;
    return out;
}

json spec_json(const ModelSpec& spec) {
    return {{"family", spec.name()}, {"hyperparameters", params_json(spec.params)},
            {"seed", spec.seed}, {"complexity_rank", complexity_rank(spec)}};
}

json task_json(const FlowReport& report, const TaskResult& task) {
    const std::string slug = task_slug(report, task);
    json rankings = json::array();
    for (const auto& r : task.rankings) {
        json order = json::array();
        for (auto idx : r.order) order.push_back(r.feature_names[idx]);
        json scores = json::object();
        for (std::size_t i = 0; i < r.scores.size(); ++i) scores[r.feature_names[i]] = r.scores[i];
        rankings.push_back({{"method", to_string(r.method)},
                            {"bin_count", r.bin_count},
                            {"order", order},
                            {"scores", scores}});
    }
    json board = json::array();
    for (const auto& c : task.leaderboard) {
        json entry = {{"name", c.name}, {"complexity_rank", c.complexity}, {"failed", c.failed}};
        if (c.failed) entry["error"] = c.error;
        if (!c.sweep.table.empty()) {
            entry["cv_accuracy"] = c.sweep.cv_accuracy;
            entry["best"] = spec_json(c.sweep.best_spec);
            json table = json::array();
            for (const auto& row : c.sweep.table) {
                table.push_back({{"hyperparameters", params_json(row.params)},
                                 {"mean_cv_accuracy", row.mean_accuracy},
                                 {"fold_accuracy", row.fold_accuracy},
                                 {"diagnostics", row.diagnostics}});
            }
            entry["grid"] = table;
        }
        board.push_back(entry);
    }
    json curves = json::object();
    for (const auto& c : task.dims.curves) curves[std::string(to_string(c.method))] = c.accuracy;

    json out = {
        {"name", task.name},
        {"class_names", task.class_names},
        {"train_class_counts", task.train_counts},
        {"fold_seed", task.fold_seed},
        {"rankings", rankings},
        {"leaderboard", board},
        {"winner", task.leaderboard.empty() ? "" : task.leaderboard[task.winner].name},
        {"dimensionality",
         {{"best_method", to_string(task.dims.best_method)},
          {"best_k", task.dims.best_k},
          {"best_cv_accuracy", task.dims.best_accuracy},
          {"curves", curves},
          {"file", "curves/" + slug + "_dimensionality.csv"}}},
        {"selected_features", task.selected_features},
        {"model",
         {{"spec", spec_json(task.model.spec)},
          {"training_accuracy", task.model.training_accuracy},
          {"converged", task.model.diagnostics.converged},
          {"iterations", task.model.diagnostics.iterations},
          {"warnings", task.model.diagnostics.warnings},
          {"file", "models/" + slug + ".json"}}},
    };
    if (task.cv_metrics) out["cv_metrics"] = metrics_json(*task.cv_metrics);
    if (task.scored) {
        out["test_class_counts"] = task.test_counts;
        out["test_metrics"] = metrics_json(task.test_metrics);
        if (!task.test_metrics.roc.empty()) out["roc_file"] = "curves/" + slug + "_roc.csv";
    }
    return out;
}

json config_json(const FlowConfig& c) {
    json rankers = json::array();
    for (auto m : c.rankers) rankers.push_back(to_string(m));
    json out = {
        {"data", c.data_path.string()},
        {"label_column", c.label_column},
        {"delimiter", std::string(1, c.delimiter)},
        {"na_policy", c.na_policy == NaPolicy::fail ? "fail" : "drop"},
        {"train_fraction", c.train_fraction},
        {"fold_count", c.fold_count},
        {"folds_positional", c.folds_positional},
        {"seed", c.seed},
        {"families", c.families.empty() ? json("default") : json(c.families)},
        {"grid", to_string(c.grid)},
        {"rankers", rankers},
        {"bin_count", c.bin_count},
        {"decision3_metric", to_string(c.decision3_metric)},
        {"threads", c.threads},
        {"hierarchy_file", c.hierarchy_path.string()},
    };
    if (c.hierarchy) {
        json levels = json::array();
        for (const auto& l : c.hierarchy->levels) {
            levels.push_back({{"name", l.name}, {"positive", l.positive}, {"negative", l.negative}});
        }
        out["hierarchy"] = levels;
    }
    return out;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw ConfigError("cannot write " + path.string());
}

void make_dirs(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<const TaskResult*> all_tasks(const FlowReport& report) {
    std::vector<const TaskResult*> out{&report.main};
    for (const auto& l : report.levels) out.push_back(&l);
    return out;
}

}  // namespace

std::string task_slug(const FlowReport& report, const TaskResult& task) {
    if (&task == &report.main) return "main";
    std::size_t index = 0;
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        if (&report.levels[i] == &task) index = i + 1;
    }
    std::string slug = "level_" + std::to_string(index);
    std::string name;
    for (char ch : task.name) {
        const auto c = static_cast<unsigned char>(ch);
        name += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
    }
    if (!name.empty()) slug += "_" + name;
    return slug;
}

json report_to_json(const FlowReport& report, const std::vector<std::string>& plot_notes) {
    json trail = json::array();
    for (const auto& r : report.trail) {
        json inputs = json::array();
        for (const auto& [k, v] : r.inputs) inputs.push_back({{"name", k}, {"value", v}});
        trail.push_back({{"stage", r.stage}, {"inputs", inputs}, {"outcome", r.outcome}});
    }
    json levels = json::array();
    for (const auto& l : report.levels) levels.push_back(task_json(report, l));

    json doc = {
        {"format", "genflow-report"},
        {"version", 1},
        {"generated_at", timestamp()},
        {"config", config_json(report.config)},
        {"data",
         {{"source", report.source_id},
          {"rows", report.rows},
          {"features", report.cols},
          {"class_names", report.class_names},
          {"class_counts", report.class_counts}}},
        {"split",
         {{"seed", report.split_seed},
          {"train_fraction", report.config.train_fraction},
          {"train_rows", report.train_rows},
          {"test_rows", report.test_rows},
          {"warnings", report.split_warnings}}},
        {"route", to_string(report.route)},
        {"main", task_json(report, report.main)},
        {"levels", levels},
        {"decision_trail", trail},
        {"advisories", report.advisories},
        {"plot_notes", plot_notes},
    };
    if (report.randomized_baseline) doc["randomized_baseline"] = *report.randomized_baseline;
    if (report.hierarchy_cv || report.hierarchy_test) {
        json h = json::object();
        if (report.hierarchy_cv) h["cv_combined"] = rates_json(*report.hierarchy_cv);
        if (report.hierarchy_test) h["test_combined"] = rates_json(*report.hierarchy_test);
        json rows = json::array();
        for (const auto& l : report.levels) {
            json row = {{"level", l.name}, {"model", l.model.spec.name()},
                        {"features", l.selected_features.size()}};
            if (l.scored) {
                row["accuracy"] = l.test_metrics.positive.accuracy;
                row["precision"] = l.test_metrics.positive.precision;
                row["recall"] = l.test_metrics.positive.recall;
                if (l.test_metrics.auc) row["auc"] = *l.test_metrics.auc;
            }
            rows.push_back(row);
        }
        h["levels"] = rows;
        doc["hierarchy"] = h;
    }
    return doc;
}

void emit_report(const FlowReport& report, const fs::path& out_dir,
                 const std::vector<std::string>& plot_notes) {
    make_dirs(out_dir / "curves");
    make_dirs(out_dir / "models");
    for (const TaskResult* task : all_tasks(report)) {
        const std::string slug = task_slug(report, *task);
        write_dimension_csv(task->dims, out_dir / "curves" / (slug + "_dimensionality.csv"));
        for (const auto& c : task->leaderboard) {
            if (!c.sweep.table.empty()) {
                write_sweep_csv(c.sweep, out_dir / "curves" / (slug + "_sweep_" + c.name + ".csv"));
            }
        }
        for (const auto& r : task->rankings) {
            write_ranking_csv(r, out_dir / "curves" /
                                     (slug + "_ranking_" + std::string(to_string(r.method)) + ".csv"));
        }
        if (task->scored && !task->test_metrics.roc.empty()) {
            std::string csv = "threshold,fpr,tpr\n";
            for (const auto& p : task->test_metrics.roc) {
                csv += fmt(p.threshold) + "," + fmt(p.fpr) + "," + fmt(p.tpr) + "\n";
            }
            write_text(out_dir / "curves" / (slug + "_roc.csv"), csv);
        }
        write_text(out_dir / "models" / (slug + ".json"), serialize_model(task->model));
    }
    write_text(out_dir / "report.json", report_to_json(report, plot_notes).dump(2) + "\n");
}

std::vector<std::string> emit_plots(const FlowReport& report, const fs::path& out_dir) {
    make_dirs(out_dir / "plots");
    std::vector<std::string> notes;
    for (const TaskResult* task : all_tasks(report)) {
        const std::string slug = task_slug(report, *task);
        const std::string title = task->name == "main" ? report.source_id : task->name;
        if (!task->dims.curves.empty()) {
            write_text(out_dir / "plots" / (slug + "_dimensionality.svg"),
                       dimension_plot_svg(task->dims, title));
        }
        if (!task->scored || task->class_names.size() != 2) continue;
        const auto& m = task->test_metrics;
        if (m.roc.empty() || !m.auc) {
            notes.push_back(slug + ": ROC plot skipped (test labels hold a single class)");
            continue;
        }
        write_text(out_dir / "plots" / (slug + "_roc.svg"), roc_plot_svg(m.roc, *m.auc, title));
    }
    return notes;
}

void emit_bundle(const FlowReport& report, const fs::path& out_dir) {
    const auto notes = emit_plots(report, out_dir);
    emit_report(report, out_dir, notes);
}

}  // namespace genflow
