#include "genflow/model.hpp"

#include "families.hpp"
#include "genflow/error.hpp"
#include "genflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace genflow {

namespace {

struct ParamRule {
    const char* name;
    double fallback;
    double min;  // inclusive lower bound unless `exclusive`
    bool exclusive;
    bool integer;
};

// A fallback of 0 for kernel_gamma means "1 / d" and is resolved at fit time.
const std::vector<ParamRule>& rules_for(Family family) {
    static const std::vector<ParamRule> lssvm = {
        {"lambda", 1e-6, 0.0, true, false},
        {"kernel_gamma", 0.0, 0.0, true, false},
    };
    static const std::vector<ParamRule> logreg = {
        {"l2", 1e-6, 0.0, true, false},
        {"max_iterations", 100, 1, false, true},
    };
    static const std::vector<ParamRule> boosted = {
        {"leaves", 20, 2, false, true},
        {"learning_rate", 0.2, 0.0, true, false},
        {"trees", 100, 1, false, true},
        {"min_leaf_samples", 10, 1, false, true},
    };
    static const std::vector<ParamRule> forest = {
        {"split_count", 128, 1, false, true},
        {"depth", 32, 1, false, true},
        {"ensemble_count", 8, 1, false, true},
    };
    static const std::vector<ParamRule> net = {
        {"hidden_nodes", 100, 1, false, true},
        {"learning_rate", 0.04, 0.0, true, false},
        {"epochs", 500, 1, false, true},
    };
    static const std::vector<ParamRule> multinomial = {
        {"l2", 1e-6, 0.0, true, false},
        {"max_iterations", 1000, 1, false, true},
    };
    static const std::vector<ParamRule> none;
    switch (family) {
        case Family::lssvm: return lssvm;
        case Family::logreg: return logreg;
        case Family::boosted_tree: return boosted;
        case Family::decision_forest: return forest;
        case Family::neural_net: return net;
        case Family::multinomial_logreg: return multinomial;
        case Family::one_vs_all: return none;
    }
    return none;
}

Family family_from_string(std::string_view name) {
    if (name == "lssvm" || name == "svm") return Family::lssvm;
    if (name == "logreg") return Family::logreg;
    if (name == "boosted_tree") return Family::boosted_tree;
    if (name == "decision_forest" || name == "forest") return Family::decision_forest;
    if (name == "neural_net") return Family::neural_net;
    if (name == "multinomial_logreg") return Family::multinomial_logreg;
    throw ConfigError("unknown model family '" + std::string(name) + "'");
}

}  // namespace

std::string_view family_name(Family family) {
    switch (family) {
        case Family::lssvm: return "lssvm";
        case Family::logreg: return "logreg";
        case Family::boosted_tree: return "boosted_tree";
        case Family::decision_forest: return "decision_forest";
        case Family::neural_net: return "neural_net";
        case Family::multinomial_logreg: return "multinomial_logreg";
        case Family::one_vs_all: return "one_vs_all";
    }
    return "unknown";
}

bool is_binary_only(Family family) {
    return family == Family::lssvm || family == Family::logreg || family == Family::boosted_tree;
}

std::string ModelSpec::name() const {
    if (family != Family::one_vs_all) return std::string(family_name(family));
    if (!base) return "ova";
    if (*base == Family::lssvm) return "ova_svm";
    return "ova_" + std::string(family_name(*base));
}

ModelSpec ModelSpec::from_name(std::string_view name) {
    ModelSpec spec;
    if (name.starts_with("ova_")) {
        spec.family = Family::one_vs_all;
        spec.base = family_from_string(name.substr(4));
    } else {
        spec.family = family_from_string(name);
    }
    return spec;
}

double ModelSpec::get(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

int complexity_rank(const ModelSpec& spec) {
    const Family f = spec.family == Family::one_vs_all && spec.base ? *spec.base : spec.family;
    switch (f) {
        case Family::logreg:
        case Family::multinomial_logreg: return 0;
        case Family::lssvm: return 1;
        case Family::decision_forest: return 2;
        case Family::boosted_tree: return 3;
        case Family::neural_net: return 4;
        case Family::one_vs_all: return 5;
    }
    return 5;
}

void validate_spec(const ModelSpec& spec) {
    Family schema_family = spec.family;
    if (spec.family == Family::one_vs_all) {
        if (!spec.base || *spec.base == Family::one_vs_all) {
            throw ConfigError("one-vs-all needs a non-ova base family");
        }
        schema_family = *spec.base;
    }
    const auto& rules = rules_for(schema_family);
    for (const auto& [key, value] : spec.params) {
        const auto it = std::find_if(rules.begin(), rules.end(),
                                     [&](const ParamRule& r) { return key == r.name; });
        if (it == rules.end()) {
            throw ConfigError("'" + key + "' is not a hyperparameter of " + spec.name());
        }
        if (!std::isfinite(value) || (it->exclusive ? value <= it->min : value < it->min)) {
            throw ConfigError(spec.name() + ": " + key + " = " + std::to_string(value) +
                              " is outside its allowed range");
        }
        if (it->integer && value != std::floor(value)) {
            throw ConfigError(spec.name() + ": " + key + " must be an integer");
        }
    }
}

Standardizer Standardizer::fit(const Matrix& x) {
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.mean[j]).square().sum() / n;
        s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

namespace {

Matrix two_columns(const Vector& positive) {
    Matrix out(positive.size(), 2);
    out.col(1) = positive;
    out.col(0) = 1.0 - positive.array();
    return out;
}

Matrix score_matrix(const TrainedModel& model, const Matrix& x) {
    const int classes = model.num_classes();
    return std::visit(
        [&](const auto& p) -> Matrix {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LsSvmParams>) {
                return two_columns(detail::score_lssvm(p, x));
            } else if constexpr (std::is_same_v<T, LogisticParams>) {
                return two_columns(detail::score_logreg(p, x));
            } else if constexpr (std::is_same_v<T, BoostedParams>) {
                return two_columns(detail::score_boosted(p, x));
            } else if constexpr (std::is_same_v<T, ForestParams>) {
                return detail::score_forest(p, x, classes);
            } else if constexpr (std::is_same_v<T, NeuralNetParams>) {
                return detail::score_neural_net(p, x, classes);
            } else if constexpr (std::is_same_v<T, MultinomialParams>) {
                return detail::score_multinomial(p, x);
            } else {
                Matrix out(x.rows(), classes);
                for (int c = 0; c < classes; ++c) {
                    out.col(c) = score_matrix(p.members[static_cast<std::size_t>(c)], x).col(1);
                }
                for (Eigen::Index i = 0; i < out.rows(); ++i) {
                    const double sum = out.row(i).sum();
                    if (sum > 0.0) {
                        out.row(i) /= sum;
                    } else {
                        out.row(i).setConstant(1.0 / classes);
                    }
                }
                return out;
            }
        },
        model.params);
}

}  // namespace

TrainedModel fit_model(const ModelSpec& spec, const Dataset& train) {
    validate_spec(spec);
    if (train.rows() == 0) throw DataError("cannot fit on an empty training set");
    if (static_cast<std::size_t>(train.features.cols()) != train.cols()) {
        throw DataError("feature matrix width does not match feature_names");
    }
    const int classes = train.num_classes();
    if (classes < 2) throw DataError("training data needs at least 2 classes");
    if (is_binary_only(spec.family) && classes != 2) {
        throw ConfigError(spec.name() + " is a binary classifier but the data has " +
                          std::to_string(classes) + " classes");
    }
    if (spec.family == Family::one_vs_all) {
        return fit_one_vs_all(*spec.base, spec.params, train, spec.seed);
    }

    TrainedModel model;
    model.spec = spec;
    model.feature_names = train.feature_names;
    model.class_names = train.class_names;
    const detail::FitInput in{train.features, train.labels, classes, spec};
    auto& diag = model.diagnostics;
    switch (spec.family) {
        case Family::lssvm: model.params = detail::fit_lssvm(in, diag); break;
        case Family::logreg: model.params = detail::fit_logreg(in, diag); break;
        case Family::boosted_tree: model.params = detail::fit_boosted(in, diag); break;
        case Family::decision_forest: model.params = detail::fit_forest(in, diag); break;
        case Family::neural_net: model.params = detail::fit_neural_net(in, diag); break;
        case Family::multinomial_logreg: model.params = detail::fit_multinomial(in, diag); break;
        case Family::one_vs_all: break;
    }
    if (!diag.converged) {
        diag.warnings.push_back(spec.name() + ": stopped at iteration cap " +
                                std::to_string(diag.iteration_cap) + " (gradient norm " +
                                std::to_string(diag.final_gradient_norm) + ")");
    }
    const auto predicted = predict_labels(score_matrix(model, train.features));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == train.labels[i];
    model.training_accuracy = static_cast<double>(hits) / static_cast<double>(train.rows());
    return model;
}

TrainedModel fit_one_vs_all(Family binary_family, const Hyperparameters& params,
                            const Dataset& train, std::uint64_t seed) {
    ModelSpec spec;
    spec.family = Family::one_vs_all;
    spec.base = binary_family;
    spec.params = params;
    spec.seed = seed;
    validate_spec(spec);
    const int classes = train.num_classes();
    if (classes < 2) throw DataError("one-vs-all needs at least 2 classes");

    TrainedModel model;
    model.spec = spec;
    model.feature_names = train.feature_names;
    model.class_names = train.class_names;
    OneVsAllParams ova;
    const auto counts = train.class_counts();
    for (int c = 0; c < classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            throw DataError("one-vs-all: class '" + train.class_names[static_cast<std::size_t>(c)] +
                            "' has no training samples");
        }
        Dataset member_data = train;
        for (auto& y : member_data.labels) y = (y == c) ? 1 : 0;
        member_data.class_names = {"rest", train.class_names[static_cast<std::size_t>(c)]};
        ModelSpec member_spec;
        member_spec.family = binary_family;
        member_spec.params = params;
        member_spec.seed = derive_seed(seed, static_cast<std::uint64_t>(c));
        auto member = fit_model(member_spec, member_data);
        model.diagnostics.converged = model.diagnostics.converged && member.diagnostics.converged;
        model.diagnostics.iterations += member.diagnostics.iterations;
        model.diagnostics.iteration_cap = member.diagnostics.iteration_cap;
        for (const auto& w : member.diagnostics.warnings) {
            model.diagnostics.warnings.push_back("class " + std::to_string(c) + ": " + w);
        }
        ova.members.push_back(std::move(member));
    }
    model.params = std::move(ova);
    const auto predicted = predict_labels(score_matrix(model, train.features));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == train.labels[i];
    model.training_accuracy = static_cast<double>(hits) / static_cast<double>(train.rows());
    return model;
}

Matrix predict_scores(const TrainedModel& model, const Matrix& features) {
    if (static_cast<std::size_t>(features.cols()) != model.feature_names.size()) {
        throw DataError("model expects " + std::to_string(model.feature_names.size()) +
                        " features, got " + std::to_string(features.cols()));
    }
    return score_matrix(model, features);
}

Matrix predict_scores(const TrainedModel& model, const Dataset& data) {
    if (data.feature_names != model.feature_names) {
        throw DataError("feature schema does not match the one the model was trained on");
    }
    return score_matrix(model, data.features);
}

std::vector<int> predict_labels(const Matrix& scores) {
    std::vector<int> labels(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        if (scores.cols() == 2) {
            labels[static_cast<std::size_t>(i)] = scores(i, 1) >= 0.5 ? 1 : 0;
        } else {
            Eigen::Index best = 0;
            scores.row(i).maxCoeff(&best);
            labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        }
    }
    return labels;
}

}  // namespace genflow
