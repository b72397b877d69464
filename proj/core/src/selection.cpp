#include "genflow/selection.hpp"

#include "genflow/error.hpp"
#include "genflow/parallel.hpp"
#include "genflow/rng.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>

namespace genflow {

std::vector<std::size_t> FoldPlan::validation_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) rows.push_back(i);
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::training_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) rows.push_back(i);
    }
    return rows;
}

FoldPlan make_interleaved_folds(std::size_t rows, int fold_count, std::uint64_t seed,
                                bool positional) {
    if (fold_count < 2) throw ConfigError("fold count must be at least 2");
    if (static_cast<std::size_t>(fold_count) > rows) {
        throw DataError("fold count " + std::to_string(fold_count) + " exceeds the " +
                        std::to_string(rows) + " training rows");
    }
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!positional) {
        Rng rng(seed);
        rng.shuffle(std::span<std::size_t>(order));
    }
    FoldPlan plan;
    plan.fold_count = fold_count;
    plan.assignments.assign(rows, 0);
    for (std::size_t pos = 0; pos < rows; ++pos) {
        plan.assignments[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(fold_count));
    }
    return plan;
}

FoldPlan make_interleaved_folds(const Dataset& train, int fold_count, std::uint64_t seed,
                                bool positional) {
    return make_interleaved_folds(train.rows(), fold_count, seed, positional);
}

std::size_t Grid::size() const {
    std::size_t n = 1;
    for (const auto& [name, values] : axes) n *= values.size();
    return n;
}

Hyperparameters Grid::point(std::size_t index) const {
    Hyperparameters p;
    // last axis varies fastest
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
        const auto& values = it->second;
        p[it->first] = values[index % values.size()];
        index /= values.size();
    }
    return p;
}

std::string_view to_string(GridPreset preset) {
    return preset == GridPreset::full ? "full" : "quick";
}

GridPreset parse_grid_preset(std::string_view name) {
    if (name == "full" || name == "default") return GridPreset::full;
    if (name == "quick") return GridPreset::quick;
    throw ConfigError("unknown grid preset '" + std::string(name) + "' (expected full or quick)");
}

Grid default_grid(const ModelSpec& spec, std::size_t feature_count, GridPreset preset) {
    const Family family = spec.family == Family::one_vs_all && spec.base ? *spec.base : spec.family;
    const double d = static_cast<double>(std::max<std::size_t>(feature_count, 1));
    const bool quick = preset == GridPreset::quick;
    Grid g;
    switch (family) {
        case Family::boosted_tree:
            if (quick) {
                g.axes = {{"leaves", {20}}, {"learning_rate", {0.1, 0.2}}, {"trees", {100}}};
            } else {
                g.axes = {{"leaves", {10, 20, 40}},
                          {"learning_rate", {0.04, 0.1, 0.2}},
                          {"trees", {50, 100, 200}}};
            }
            break;
        case Family::lssvm:
            if (quick) {
                g.axes = {{"lambda", {1e-4}}, {"kernel_gamma", {0.1 / d, 1.0 / d}}};
            } else {
                g.axes = {{"lambda", {1e-6, 1e-4, 1e-2}},
                          {"kernel_gamma", {0.1 / d, 1.0 / d, 10.0 / d}}};
            }
            break;
        case Family::neural_net:
            if (quick) {
                g.axes = {{"learning_rate", {0.04}}, {"hidden_nodes", {100}}};
            } else {
                g.axes = {{"learning_rate", {0.01, 0.04, 0.1}}, {"hidden_nodes", {25, 100}}};
            }
            break;
        case Family::decision_forest:
            if (quick) {
                g.axes = {{"split_count", {128}}, {"depth", {16}}, {"ensemble_count", {32}}};
            } else {
                g.axes = {{"split_count", {128, 1024}},
                          {"depth", {16, 64}},
                          {"ensemble_count", {8, 32}}};
            }
            break;
        case Family::logreg:
        case Family::multinomial_logreg:
            g.axes = {{"l2", {1e-6}}};
            break;
        case Family::one_vs_all:
            throw ConfigError("one-vs-all needs a base family");
    }
    return g;
}

namespace {

double fold_accuracy(const TrainedModel& model, const Dataset& validation) {
    const auto predicted = predict_labels(predict_scores(model, validation));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == validation.labels[i];
    return validation.rows() ? static_cast<double>(hits) / static_cast<double>(validation.rows())
                             : 0.0;
}

struct FoldData {
    Dataset train;
    Dataset validation;
};

std::vector<FoldData> materialize(const Dataset& train, const FoldPlan& folds) {
    if (folds.assignments.size() != train.rows()) {
        throw ConfigError("fold plan covers " + std::to_string(folds.assignments.size()) +
                          " rows but the training set has " + std::to_string(train.rows()));
    }
    std::vector<FoldData> out;
    for (int k = 0; k < folds.fold_count; ++k) {
        const auto tr = folds.training_rows(k);
        const auto va = folds.validation_rows(k);
        out.push_back({train.subset(tr), train.subset(va)});
    }
    return out;
}

ModelSpec fold_spec(ModelSpec spec, int fold) {
    spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(fold));
    return spec;
}

struct FoldOutcome {
    double accuracy = 0.0;
    bool failed = false;
    std::string diagnostic;
};

FoldOutcome run_fold(const ModelSpec& spec, const FoldData& fold, int k) {
    FoldOutcome out;
    try {
        const TrainedModel model = fit_model(fold_spec(spec, k), fold.train);
        out.accuracy = fold_accuracy(model, fold.validation);
        if (!model.diagnostics.converged) {
            out.diagnostic = "fold " + std::to_string(k + 1) + ": not converged after " +
                             std::to_string(model.diagnostics.iterations) + " iterations";
        }
    } catch (const Error& e) {
        out.accuracy = 0.0;
        out.failed = true;
        out.diagnostic = "fold " + std::to_string(k + 1) + ": fit failed: " + e.what();
    }
    return out;
}

}  // namespace

SweepResult sweep_parameters(const ModelSpec& base, const Grid& grid, const Dataset& train,
                             const FoldPlan& folds, unsigned threads) {
    if (grid.axes.empty() || grid.size() == 0) throw ConfigError("empty hyperparameter grid");
    const std::size_t points = grid.size();
    std::vector<ModelSpec> specs;
    specs.reserve(points);
    for (std::size_t p = 0; p < points; ++p) {
        ModelSpec spec = base;
        for (const auto& [k, v] : grid.point(p)) spec.params[k] = v;
        validate_spec(spec);
        specs.push_back(std::move(spec));
    }
    const auto data = materialize(train, folds);
    const auto k_count = static_cast<std::size_t>(folds.fold_count);
    std::vector<FoldOutcome> outcomes(points * k_count);
    parallel_for(outcomes.size(), threads, [&](std::size_t task) {
        const std::size_t p = task / k_count;
        const int k = static_cast<int>(task % k_count);
        outcomes[task] = run_fold(specs[p], data[static_cast<std::size_t>(k)], k);
    });

    SweepResult result;
    result.table.resize(points);
    for (std::size_t p = 0; p < points; ++p) {
        auto& row = result.table[p];
        row.params = grid.point(p);
        double sum = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            const auto& o = outcomes[p * k_count + k];
            row.fold_accuracy.push_back(o.accuracy);
            sum += o.accuracy;
            row.failed_folds += o.failed;
            if (!o.diagnostic.empty()) row.diagnostics.push_back(o.diagnostic);
        }
        row.mean_accuracy = sum / static_cast<double>(k_count);
        if (p == 0 || row.mean_accuracy > result.cv_accuracy) {
            result.cv_accuracy = row.mean_accuracy;
            result.best_index = p;
        }
    }
    result.best_spec = specs[result.best_index];
    return result;
}

DimSweepResult dimensionality_sweep(const ModelSpec& spec, const Dataset& train,
                                    const FoldPlan& folds,
                                    std::span<const RankedFeatures> rankings, unsigned threads) {
    if (rankings.empty()) throw ConfigError("dimensionality sweep needs at least one ranking");
    const std::size_t d = train.cols();
    const auto k_count = static_cast<std::size_t>(folds.fold_count);
    const auto data = materialize(train, folds);
    const std::size_t per_method = d * k_count;
    std::vector<FoldOutcome> outcomes(rankings.size() * per_method);

    parallel_for(outcomes.size(), threads, [&](std::size_t task) {
        const std::size_t m = task / per_method;
        const std::size_t k = (task % per_method) / k_count + 1;
        const int fold = static_cast<int>(task % k_count);
        const auto& fd = data[static_cast<std::size_t>(fold)];
        const FoldData projected{project_top_k(fd.train, rankings[m], k),
                                 project_top_k(fd.validation, rankings[m], k)};
        outcomes[task] = run_fold(spec, projected, fold);
    });

    DimSweepResult result;
    for (std::size_t m = 0; m < rankings.size(); ++m) {
        DimCurve curve;
        curve.method = rankings[m].method;
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<double> per_fold;
            double sum = 0.0;
            for (std::size_t f = 0; f < k_count; ++f) {
                const double acc = outcomes[m * per_method + k * k_count + f].accuracy;
                per_fold.push_back(acc);
                sum += acc;
            }
            curve.accuracy.push_back(sum / static_cast<double>(k_count));
            curve.fold_accuracy.push_back(std::move(per_fold));
        }
        result.curves.push_back(std::move(curve));
    }
    // smaller k first, then ranking order; strict improvement only
    bool first = true;
    for (std::size_t k = 0; k < d; ++k) {
        for (const auto& curve : result.curves) {
            if (first || curve.accuracy[k] > result.best_accuracy) {
                result.best_accuracy = curve.accuracy[k];
                result.best_k = k + 1;
                result.best_method = curve.method;
                first = false;
            }
        }
    }
    return result;
}

Matrix cross_validated_scores(const ModelSpec& spec, const Dataset& train, const FoldPlan& folds,
                              unsigned threads, std::vector<std::string>* failures) {
    const auto data = materialize(train, folds);
    const int classes = train.num_classes();
    Matrix scores = Matrix::Constant(static_cast<Eigen::Index>(train.rows()), classes,
                                     1.0 / classes);
    std::vector<Matrix> fold_scores(data.size());
    std::vector<std::string> errors(data.size());
    parallel_for(data.size(), threads, [&](std::size_t k) {
        try {
            const auto model = fit_model(fold_spec(spec, static_cast<int>(k)), data[k].train);
            fold_scores[k] = predict_scores(model, data[k].validation);
        } catch (const Error& e) {
            errors[k] = "fold " + std::to_string(k + 1) + ": fit failed: " + e.what();
        }
    });
    for (std::size_t k = 0; k < data.size(); ++k) {
        if (!errors[k].empty()) {
            if (failures) failures->push_back(errors[k]);
            continue;
        }
        const auto rows = folds.validation_rows(static_cast<int>(k));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            scores.row(static_cast<Eigen::Index>(rows[i])) =
                fold_scores[k].row(static_cast<Eigen::Index>(i));
        }
    }
    return scores;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path) {
    auto out = open_csv(path);
    if (sweep.table.empty()) return;
    out << "point";
    for (const auto& [k, v] : sweep.table.front().params) out << ',' << k;
    out << ",mean_cv_accuracy";
    for (std::size_t f = 0; f < sweep.table.front().fold_accuracy.size(); ++f) {
        out << ",fold_" << f + 1;
    }
    out << '\n';
    for (std::size_t p = 0; p < sweep.table.size(); ++p) {
        const auto& row = sweep.table[p];
        out << p;
        for (const auto& [k, v] : row.params) out << ',' << fmt(v);
        out << ',' << fmt(row.mean_accuracy);
        for (double a : row.fold_accuracy) out << ',' << fmt(a);
        out << '\n';
    }
}

void write_dimension_csv(const DimSweepResult& dims, const std::filesystem::path& path) {
    auto out = open_csv(path);
    std::size_t folds = 0;
    if (!dims.curves.empty() && !dims.curves.front().fold_accuracy.empty()) {
        folds = dims.curves.front().fold_accuracy.front().size();
    }
    out << "method,k,mean_cv_accuracy";
    for (std::size_t f = 0; f < folds; ++f) out << ",fold_" << f + 1;
    out << '\n';
    for (const auto& curve : dims.curves) {
        for (std::size_t k = 0; k < curve.accuracy.size(); ++k) {
            out << to_string(curve.method) << ',' << k + 1 << ',' << fmt(curve.accuracy[k]);
            for (double a : curve.fold_accuracy[k]) out << ',' << fmt(a);
            out << '\n';
        }
    }
}

}  // namespace genflow
