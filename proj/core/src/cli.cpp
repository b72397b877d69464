#include "genflow/error.hpp"
#include "genflow/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace genflow {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t") return '\t';
    if (text == "space") return ' ';
    if (text.size() != 1) throw ConfigError("delimiter must be a single character, got '" + text + "'");
    return text[0];
}

std::uint64_t parse_seed(const std::string& text, const char* origin) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(origin) + ": seed must be a non-negative integer, got '" + text +
                          "'");
    }
}

void print_summary(const FlowReport& r, const std::filesystem::path& out) {
    std::cout << "route: " << to_string(r.route) << "\n";
    const auto& main = r.main;
    std::cout << "model: " << main.model.spec.name() << " on " << main.selected_features.size()
              << " of " << r.cols << " features (" << to_string(main.dims.best_method) << ")\n";
    const auto& m = main.test_metrics;
    if (r.route == Route::binary) {
        std::printf("test accuracy %.4f  precision %.4f  recall %.4f", m.positive.accuracy,
                    m.positive.precision, m.positive.recall);
        if (m.auc) std::printf("  auc %.4f", *m.auc);
        std::printf("\n");
    } else {
        std::printf("flat test: overall accuracy %.4f  macro recall %.4f  micro accuracy %.4f\n",
                    m.overall_accuracy, m.macro.recall, m.micro.accuracy);
        if (r.randomized_baseline) std::printf("randomized recall %.4f\n", *r.randomized_baseline);
        if (r.hierarchy_test) {
            std::printf("hierarchy test: accuracy %.4f  precision %.4f  recall %.4f\n",
                        r.hierarchy_test->accuracy, r.hierarchy_test->precision,
                        r.hierarchy_test->recall);
        }
    }
    for (const auto& a : r.advisories) std::cout << "note: " << a << "\n";
    std::cout << "report: " << (out / "report.json").string() << std::endl;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Generalized classification flow: split, rank, sweep, reduce, decide, report."};
    app.set_version_flag("--version", "genflow 0.1.0");

    FlowConfig config;
    std::string data, label, delimiter = ",", out = "genflow-out", families, rankers,
                               hierarchy, metric = "recall", grid = "full", na = "fail";
    std::optional<std::string> seed;
    app.add_option("--data", data, "input CSV (header row required)")->required();
    app.add_option("--label-col", label, "label column name or 0-based index")->required();
    app.add_option("--delimiter", delimiter, "field delimiter (',' by default; 'tab' accepted)");
    app.add_option("--seed", seed, "master seed (falls back to $GENFLOW_SEED, then 0)");
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--train-fraction", config.train_fraction, "training share of each class")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--folds", config.fold_count, "cross-validation folds")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
    app.add_flag("--folds-positional", config.folds_positional,
                 "assign folds by file order instead of after a seeded shuffle");
    app.add_option("--families", families, "comma-separated candidate families (default: by route)");
    app.add_option("--rankers", rankers, "comma-separated ranking methods (fisher,mutual_info,chi_squared,mrmr)");
    app.add_option("--bins", config.bin_count, "bins for mutual information and chi-squared")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    app.add_option("--hierarchy", hierarchy, "hierarchy levels (JSON)");
    app.add_option("--decision3-metric", metric, "recall or accuracy")->capture_default_str();
    app.add_option("--grid", grid, "hyperparameter grid preset: full or quick")->capture_default_str();
    app.add_option("--threads", config.threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--na-policy", na, "missing cells: fail or drop")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        config.data_path = data;
        config.label_column = label;
        config.delimiter = parse_delimiter(delimiter);
        config.output_dir = out;
        if (seed) {
            config.seed = parse_seed(*seed, "--seed");
        } else if (const char* env = std::getenv("GENFLOW_SEED"); env && *env) {
            config.seed = parse_seed(env, "GENFLOW_SEED");
        }
        if (!families.empty()) config.families = split_list(families);
        if (!rankers.empty()) {
            config.rankers.clear();
            for (const auto& r : split_list(rankers)) config.rankers.push_back(parse_ranking_method(r));
        }
        config.decision3_metric = parse_decision3_metric(metric);
        config.grid = parse_grid_preset(grid);
        if (na == "fail") {
            config.na_policy = NaPolicy::fail;
        } else if (na == "drop" || na == "drop_row") {
            config.na_policy = NaPolicy::drop_row;
        } else {
            throw ConfigError("--na-policy must be fail or drop");
        }
        if (!hierarchy.empty()) {
            config.hierarchy_path = hierarchy;
            config.hierarchy = load_hierarchy(hierarchy);
        }

        LoadOptions load;
        load.label_column = config.label_column;
        load.delimiter = config.delimiter;
        load.na_policy = config.na_policy;
        LoadSummary summary;
        const Dataset dataset = load_dataset(config.data_path, load, &summary);
        if (summary.dropped_rows) {
            std::cerr << "dropped " << summary.dropped_rows << " rows with missing values\n";
        }
        const FlowReport report = run_flow(dataset, config);
        emit_bundle(report, config.output_dir);
        print_summary(report, config.output_dir);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "genflow: configuration error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "genflow: data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "genflow: internal error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace genflow
