#pragma once

#include "genflow/dataset.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace genflow {

enum class Family {
    lssvm,
    logreg,
    boosted_tree,
    decision_forest,
    neural_net,
    multinomial_logreg,
    one_vs_all,
};

using Hyperparameters = std::map<std::string, double>;

/// A classifier family, its hyperparameters, and the seed for any randomness.
///
/// One-vs-all wraps a binary family: `ova_boosted_tree` is
/// {one_vs_all, base = boosted_tree}, `ova_svm` is {one_vs_all, base = lssvm}.
struct ModelSpec {
    Family family = Family::logreg;
    std::optional<Family> base;
    Hyperparameters params;
    std::uint64_t seed = 0;

    /// Canonical name: "lssvm", "ova_svm", "ova_boosted_tree", ...
    std::string name() const;
    static ModelSpec from_name(std::string_view name);

    double get(const std::string& key, double fallback) const;
};

std::string_view family_name(Family family);
bool is_binary_only(Family family);

/// Simpler families rank lower; used to break ties between similar scores.
int complexity_rank(const ModelSpec& spec);

/// Throws ConfigError when a hyperparameter violates the family schema.
void validate_spec(const ModelSpec& spec);

/// Per-feature z-scoring fitted on training rows; constant features get scale 1.
struct Standardizer {
    Vector mean;
    Vector scale;

    static Standardizer fit(const Matrix& x);
    Matrix apply(const Matrix& x) const;
};

struct LsSvmParams {
    Standardizer scaler;
    Matrix support;       // standardized training rows
    Vector alpha;         // dual coefficients
    Vector sign_labels;   // -1 / +1 per support row
    double bias = 0.0;
    double kernel_gamma = 1.0;
};

struct LogisticParams {
    Standardizer scaler;
    double intercept = 0.0;
    Vector weights;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;     // x[feature] < threshold
    int right = -1;
    double value = 0.0;  // leaf output (regression trees)
    int leaf = -1;       // leaf slot in distributions (classification trees)
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(const double* row, Eigen::Index stride) const;
};

struct BoostedParams {
    double base_score = 0.0;  // log-odds of the training prior
    std::vector<RegressionTree> trees;  // leaf values already include the learning rate
};

struct ClassificationTree {
    std::vector<TreeNode> nodes;
    std::vector<double> distributions;  // leaves x classes, rows sum to 1
    const double* predict(const double* row, Eigen::Index stride, int num_classes) const;
};

struct ForestParams {
    std::vector<ClassificationTree> trees;
};

struct NeuralNetParams {
    Standardizer scaler;
    Matrix hidden_weights;  // hidden x inputs
    Vector hidden_bias;
    Matrix output_weights;  // outputs x hidden (1 sigmoid output for binary, C softmax outputs)
    Vector output_bias;
};

struct MultinomialParams {
    Standardizer scaler;
    Matrix coefficients;  // classes x (1 + d), column 0 is the intercept
};

class TrainedModel;

struct OneVsAllParams {
    std::vector<TrainedModel> members;  // member i scores class i vs rest
};

struct FitDiagnostics {
    bool converged = true;
    int iterations = 0;
    int iteration_cap = 0;
    double final_gradient_norm = 0.0;
    std::vector<std::string> warnings;
};

using ModelParams = std::variant<LsSvmParams, LogisticParams, BoostedParams, ForestParams,
                                 NeuralNetParams, MultinomialParams, OneVsAllParams>;

/// A fitted, immutable predictor.
class TrainedModel {
public:
    ModelSpec spec;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    ModelParams params;
    FitDiagnostics diagnostics;
    double training_accuracy = 0.0;

    int num_classes() const { return static_cast<int>(class_names.size()); }
};

TrainedModel fit_model(const ModelSpec& spec, const Dataset& train);

/// N x C class probabilities; rows sum to one.
Matrix predict_scores(const TrainedModel& model, const Dataset& data);
Matrix predict_scores(const TrainedModel& model, const Matrix& features);

/// Binary: class 1 iff its score >= 0.5. Multi-class: first argmax.
std::vector<int> predict_labels(const Matrix& scores);

TrainedModel fit_one_vs_all(Family binary_family, const Hyperparameters& params,
                            const Dataset& train, std::uint64_t seed = 0);

/// Structured text (JSON) with every float encoded as a C99 hex literal.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view text);

}  // namespace genflow
