#include "genflow/flow.hpp"

#include "genflow/error.hpp"
#include "genflow/parallel.hpp"
#include "genflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace genflow {

std::string_view to_string(Route route) {
    switch (route) {
        case Route::binary: return "binary";
        case Route::multiclass_flat: return "multiclass_flat";
        case Route::multiclass_hierarchical: return "multiclass_hierarchical";
    }
    return "?";
}

std::string_view to_string(Decision3Metric metric) {
    return metric == Decision3Metric::recall ? "recall" : "accuracy";
}

Decision3Metric parse_decision3_metric(std::string_view name) {
    if (name == "recall") return Decision3Metric::recall;
    if (name == "accuracy") return Decision3Metric::accuracy;
    throw ConfigError("decision3 metric must be recall or accuracy, got '" + std::string(name) +
                      "'");
}

std::vector<std::string> default_candidates(bool binary) {
    if (binary) return {"lssvm", "logreg", "boosted_tree", "decision_forest", "neural_net"};
    return {"multinomial_logreg", "neural_net", "decision_forest", "ova_boosted_tree", "ova_svm"};
}

bool decision_route(const Dataset& data) { return data.num_classes() == 2; }

std::size_t select_best_model(std::span<const CandidateResult> leaderboard) {
    std::optional<std::size_t> best;
    double best_rounded = 0.0;
    for (std::size_t i = 0; i < leaderboard.size(); ++i) {
        const auto& c = leaderboard[i];
        if (c.failed) continue;
        // "scored similarly" = equal at 4 decimals
        const double rounded = std::round(c.sweep.cv_accuracy * 1e4);
        if (!best || rounded > best_rounded ||
            (rounded == best_rounded && c.complexity < leaderboard[*best].complexity)) {
            best = i;
            best_rounded = rounded;
        }
    }
    if (!best) throw PipelineError("decision2", "every candidate model failed to fit");
    return *best;
}

std::vector<CandidateResult> sweep_candidates(std::span<const std::string> candidates,
                                              const Dataset& train, const FoldPlan& folds,
                                              GridPreset grid, std::uint64_t seed,
                                              unsigned threads) {
    std::vector<CandidateResult> board;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        CandidateResult c;
        c.name = candidates[i];
        ModelSpec spec = ModelSpec::from_name(c.name);
        spec.seed = derive_seed(seed, i);
        c.complexity = complexity_rank(spec);
        try {
            c.sweep = sweep_parameters(spec, default_grid(spec, train.cols(), grid), train, folds,
                                       threads);
            const auto fold_total = static_cast<int>(c.sweep.table.size()) * folds.fold_count;
            int failed = 0;
            for (const auto& row : c.sweep.table) failed += row.failed_folds;
            if (failed == fold_total) {
                c.failed = true;
                c.error = c.sweep.table.front().diagnostics.front();
            }
        } catch (const Error& e) {
            c.failed = true;
            c.error = e.what();
        }
        board.push_back(std::move(c));
    }
    return board;
}

Decision3Outcome decision_hierarchy(double flat, double baseline,
                                    std::optional<double> hierarchical) {
    Decision3Outcome out;
    if (flat >= baseline) {
        out.reason = "flat result reaches the randomized baseline";
        return out;
    }
    if (!hierarchical) {
        out.advisory = true;
        out.reason = "flat result below the randomized baseline; hierarchy recommended";
        return out;
    }
    if (*hierarchical > flat) {
        out.hierarchical = true;
        out.reason = "hierarchy beats the flat classifier";
    } else {
        out.reason = "hierarchy does not beat the flat classifier";
    }
    return out;
}

double decision3_value(const Rates& macro, double overall_accuracy, Decision3Metric metric) {
    return metric == Decision3Metric::recall ? macro.recall : overall_accuracy;
}

std::vector<DecisionRecord> trail_before_scoring(const FlowReport& report) {
    std::vector<DecisionRecord> out;
    for (const auto& r : report.trail) {
        if (r.stage == "final_scoring") break;
        out.push_back(r);
    }
    return out;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string describe(const ModelSpec& spec) {
    std::string out = spec.name();
    std::vector<std::string> kv;
    for (const auto& [k, v] : spec.params) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s=%.6g", k.c_str(), v);
        kv.emplace_back(buf);
    }
    if (!kv.empty()) out += "(" + join(kv) + ")";
    return out;
}

std::vector<std::int64_t> counts_of(const Dataset& d) {
    std::vector<std::int64_t> out;
    for (auto c : d.class_counts()) out.push_back(static_cast<std::int64_t>(c));
    return out;
}

// Runs fn, prefixing any library error with the stage name.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const DataError& e) {
        throw DataError(std::string(stage) + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(stage) + ": " + e.what());
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

EvalMetrics metrics_for(const Matrix& scores, std::span<const int> truth, int classes) {
    const auto predicted = predict_labels(scores);
    const auto counts = confusion_counts(truth, predicted, classes);
    if (classes != 2) return averaged_metrics(counts);
    EvalMetrics m = binary_metrics(counts);
    std::vector<double> positive(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) positive[static_cast<std::size_t>(i)] = scores(i, 1);
    const RocCurve roc = roc_and_auc(positive, truth);
    m.roc = roc.points;
    m.auc = roc.auc;
    for (const auto& f : roc.flags) m.flags.push_back(f);
    return m;
}

struct TaskPlan {
    std::string name;
    std::vector<std::string> candidates;
    std::uint64_t seed = 0;
    bool want_cv = false;
};

const RankedFeatures& chosen_ranking(const TaskResult& task) {
    for (const auto& r : task.rankings) {
        if (r.method == task.dims.best_method) return r;
    }
    throw PipelineError("dimensionality", "chosen ranking missing");
}

// Everything up to (not including) test scoring. Reads only `train`.
TaskResult prepare_task(const TaskPlan& plan, const Dataset& train, const FlowConfig& config,
                        unsigned threads, std::vector<DecisionRecord>& trail) {
    TaskResult task;
    task.name = plan.name;
    task.class_names = train.class_names;
    task.train_counts = counts_of(train);
    const std::string tag = plan.name == "main" ? "" : "[" + plan.name + "] ";

    in_stage("ranking", [&] {
        DecisionRecord rec{"ranking", {}, tag + "features ranked on the training split"};
        for (auto method : config.rankers) {
            task.rankings.push_back(rank_features(train, method, config.bin_count));
            std::vector<std::string> top;
            for (auto idx : task.rankings.back().order) top.push_back(train.feature_names[idx]);
            rec.inputs.emplace_back(std::string(to_string(method)), join(top));
        }
        trail.push_back(std::move(rec));
        return 0;
    });

    task.fold_seed = derive_seed(plan.seed, 1);
    const FoldPlan folds = in_stage("folds", [&] {
        return make_interleaved_folds(train, config.fold_count, task.fold_seed,
                                      config.folds_positional);
    });

    in_stage("decision2", [&] {
        task.leaderboard = sweep_candidates(plan.candidates, train, folds, config.grid,
                                            derive_seed(plan.seed, 2), threads);
        task.winner = select_best_model(task.leaderboard);
        DecisionRecord rec{"decision2_model", {}, {}};
        for (const auto& c : task.leaderboard) {
            rec.inputs.emplace_back(c.name, c.failed ? "failed: " + c.error
                                                     : num(c.sweep.cv_accuracy) + " " +
                                                           describe(c.sweep.best_spec));
        }
        rec.outcome = tag + describe(task.leaderboard[task.winner].sweep.best_spec);
        trail.push_back(std::move(rec));
        return 0;
    });

    const ModelSpec& best = task.leaderboard[task.winner].sweep.best_spec;
    in_stage("dimensionality", [&] {
        task.dims = dimensionality_sweep(best, train, folds, task.rankings, threads);
        DecisionRecord rec{"dimensionality", {}, {}};
        for (const auto& curve : task.dims.curves) {
            const auto peak = std::max_element(curve.accuracy.begin(), curve.accuracy.end());
            rec.inputs.emplace_back(
                std::string(to_string(curve.method)),
                "peak " + num(*peak) + " at k=" +
                    std::to_string(peak - curve.accuracy.begin() + 1) + ", all features " +
                    num(curve.accuracy.back()));
        }
        rec.outcome = tag + std::string(to_string(task.dims.best_method)) +
                      " top " + std::to_string(task.dims.best_k) + " (" +
                      num(task.dims.best_accuracy) + ")";
        trail.push_back(std::move(rec));
        return 0;
    });

    in_stage("final_fit", [&] {
        const auto& ranking = chosen_ranking(task);
        const Dataset projected = project_top_k(train, ranking, task.dims.best_k);
        task.selected_features = projected.feature_names;
        task.model = fit_model(best, projected);
        if (plan.want_cv) {
            std::vector<std::string> failures;
            const Matrix oof = cross_validated_scores(best, projected, folds, threads, &failures);
            task.cv_metrics = metrics_for(oof, projected.labels, projected.num_classes());
            for (auto& f : failures) task.cv_metrics->flags.push_back(std::move(f));
        }
        DecisionRecord rec{"final_fit",
                           {{"features", join(task.selected_features)},
                            {"training_accuracy", num(task.model.training_accuracy)}},
                           tag + describe(task.model.spec)};
        if (task.cv_metrics) {
            rec.inputs.emplace_back("cv_macro_recall", num(task.cv_metrics->macro.recall));
            rec.inputs.emplace_back("cv_overall_accuracy",
                                    num(task.cv_metrics->overall_accuracy));
        }
        trail.push_back(std::move(rec));
        return 0;
    });
    return task;
}

void score_task(TaskResult& task, const Dataset& test) {
    const Dataset projected = project_top_k(test, chosen_ranking(task), task.dims.best_k);
    task.test_counts = counts_of(test);
    task.test_metrics =
        metrics_for(predict_scores(task.model, projected), projected.labels, test.num_classes());
    task.scored = true;
}

std::string side_name(const Dataset& data, const std::vector<int>& ids) {
    std::vector<std::string> names;
    for (int c : ids) names.push_back(data.class_names[static_cast<std::size_t>(c)]);
    return join(names, "+");
}

std::vector<std::string> applicable(const FlowConfig& config, bool binary,
                                    std::vector<std::string>& advisories) {
    if (config.families.empty()) return default_candidates(binary);
    std::vector<std::string> out;
    for (const auto& name : config.families) {
        const ModelSpec spec = ModelSpec::from_name(name);
        if (!binary && spec.family != Family::one_vs_all && is_binary_only(spec.family)) {
            advisories.push_back("skipped binary-only family " + name + " on multi-class data");
            continue;
        }
        out.push_back(spec.name());
    }
    if (out.empty()) throw ConfigError("no requested family applies to this data set");
    return out;
}

Rates positive_rates(const EvalMetrics& m) { return m.positive; }

}  // namespace

FlowReport run_flow(const SplitPair& split, const FlowConfig& config) {
    FlowReport report;
    report.config = config;
    const Dataset& train = split.train;
    report.source_id = train.source_id;
    report.rows = split.train.rows() + split.test.rows();
    report.cols = train.cols();
    report.class_names = train.class_names;
    report.class_counts = counts_of(train);
    {
        const auto test_counts = counts_of(split.test);
        for (std::size_t c = 0; c < report.class_counts.size(); ++c) {
            report.class_counts[c] += test_counts[c];
        }
    }
    report.split_seed = split.seed;
    report.train_rows = split.train.rows();
    report.test_rows = split.test.rows();
    report.split_warnings = split.warnings;
    const unsigned threads = resolve_threads(config.threads);

    report.trail.push_back({"split",
                            {{"train_fraction", num(split.train_fraction)},
                             {"seed", std::to_string(split.seed)},
                             {"train_rows", std::to_string(split.train.rows())},
                             {"test_rows", std::to_string(split.test.rows())}},
                            "stratified split"});

    const bool binary = decision_route(train);
    report.trail.push_back({"decision1_route",
                            {{"classes", std::to_string(train.num_classes())}},
                            binary ? "binary" : "multiclass"});
    report.route = binary ? Route::binary : Route::multiclass_flat;

    const auto candidates = in_stage("config", [&] {
        auto c = applicable(config, binary, report.advisories);
        if (config.hierarchy) {
            if (binary) {
                report.advisories.push_back("hierarchy ignored: the data set is binary");
            } else {
                validate_hierarchy(*config.hierarchy, train.num_classes());
            }
        }
        return c;
    });

    report.main = prepare_task({"main", candidates, derive_seed(config.seed, 1000), !binary},
                               train, config, threads, report.trail);

    if (!binary) {
        const auto train_counts = counts_of(train);
        report.randomized_baseline = randomized_recall(train_counts);
        const auto& cv = *report.main.cv_metrics;
        const double flat = decision3_value(cv.macro, cv.overall_accuracy, config.decision3_metric);
        std::optional<double> hier;
        if (flat < *report.randomized_baseline && config.hierarchy) {
            const auto binary_candidates = applicable(config, true, report.advisories);
            in_stage("hierarchy", [&] {
                const auto& levels = config.hierarchy->levels;
                for (std::size_t i = 0; i < levels.size(); ++i) {
                    const auto& level = levels[i];
                    const Dataset level_train =
                        binarize(train, level.positive, level.negative,
                                 side_name(train, level.positive), side_name(train, level.negative));
                    const auto lc = level_train.class_counts();
                    if (lc[0] == 0 || lc[1] == 0) {
                        throw DataError("level '" + level.name +
                                        "' has an empty side on the training split");
                    }
                    report.levels.push_back(prepare_task(
                        {level.name, binary_candidates, derive_seed(config.seed, 2000 + i), true},
                        level_train, config, threads, report.trail));
                }
                return 0;
            });
            std::vector<Rates> level_rates;
            for (const auto& l : report.levels) level_rates.push_back(positive_rates(*l.cv_metrics));
            report.hierarchy_cv = combine_levels(level_rates);
            hier = config.decision3_metric == Decision3Metric::recall ? report.hierarchy_cv->recall
                                                                      : report.hierarchy_cv->accuracy;
        }
        const auto d3 = decision_hierarchy(flat, *report.randomized_baseline, hier);
        DecisionRecord rec{"decision3_hierarchy",
                           {{"metric", std::string(to_string(config.decision3_metric))},
                            {"flat_cv", num(flat)},
                            {"randomized_baseline", num(*report.randomized_baseline)}},
                           d3.reason};
        if (hier) rec.inputs.emplace_back("hierarchy_cv", num(*hier));
        report.trail.push_back(std::move(rec));
        if (d3.advisory) report.advisories.push_back("hierarchy recommended");
        if (d3.hierarchical) report.route = Route::multiclass_hierarchical;
    }

    // Final scoring: the only stage that reads the test split.
    in_stage("final_scoring", [&] {
        score_task(report.main, split.test);
        DecisionRecord rec{"final_scoring",
                           {{"test_rows", std::to_string(split.test.rows())}},
                           std::string(to_string(report.route))};
        if (binary) {
            rec.inputs.emplace_back("test_accuracy", num(report.main.test_metrics.positive.accuracy));
            if (report.main.test_metrics.auc) {
                rec.inputs.emplace_back("test_auc", num(*report.main.test_metrics.auc));
            }
        } else {
            rec.inputs.emplace_back("flat_test_macro_recall",
                                    num(report.main.test_metrics.macro.recall));
            rec.inputs.emplace_back("flat_test_overall_accuracy",
                                    num(report.main.test_metrics.overall_accuracy));
        }
        if (!report.levels.empty()) {
            std::vector<Rates> level_rates;
            const auto& levels = config.hierarchy->levels;
            for (std::size_t i = 0; i < report.levels.size(); ++i) {
                const auto& level = levels[i];
                const Dataset level_test =
                    binarize(split.test, level.positive, level.negative,
                             side_name(split.test, level.positive),
                             side_name(split.test, level.negative));
                const auto lc = level_test.class_counts();
                if (lc[0] == 0 || lc[1] == 0) {
                    throw DataError("level '" + level.name + "' has an empty side on the test split");
                }
                score_task(report.levels[i], level_test);
                level_rates.push_back(positive_rates(report.levels[i].test_metrics));
            }
            report.hierarchy_test = combine_levels(level_rates);
            rec.inputs.emplace_back("hierarchy_test_macro_recall", num(report.hierarchy_test->recall));
        }
        report.trail.push_back(std::move(rec));
        return 0;
    });
    return report;
}

FlowReport run_flow(const Dataset& data, const FlowConfig& config) {
    in_stage("input", [&] {
        validate(data);
        return 0;
    });
    const SplitPair split =
        in_stage("split", [&] { return stratified_split(data, config.train_fraction, config.seed); });
    FlowReport report = run_flow(split, config);
    report.source_id = data.source_id;
    return report;
}

}  // namespace genflow
