#pragma once

// Per-family fit/score entry points used by fit_model() and predict_scores().

#include "genflow/model.hpp"

#include <cmath>
#include <span>

namespace genflow::detail {

struct FitInput {
    const Matrix& x;  // raw (unscaled) features
    std::span<const int> labels;
    int classes;
    const ModelSpec& spec;
};

LsSvmParams fit_lssvm(const FitInput& in, FitDiagnostics& diag);
Vector score_lssvm(const LsSvmParams& model, const Matrix& x);

LogisticParams fit_logreg(const FitInput& in, FitDiagnostics& diag);
Vector score_logreg(const LogisticParams& model, const Matrix& x);

MultinomialParams fit_multinomial(const FitInput& in, FitDiagnostics& diag);
Matrix score_multinomial(const MultinomialParams& model, const Matrix& x);

BoostedParams fit_boosted(const FitInput& in, FitDiagnostics& diag);
Vector score_boosted(const BoostedParams& model, const Matrix& x);

ForestParams fit_forest(const FitInput& in, FitDiagnostics& diag);
Matrix score_forest(const ForestParams& model, const Matrix& x, int classes);

NeuralNetParams fit_neural_net(const FitInput& in, FitDiagnostics& diag);
Matrix score_neural_net(const NeuralNetParams& model, const Matrix& x, int classes);

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace genflow::detail
