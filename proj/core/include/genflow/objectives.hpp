#pragma once

// Training objectives and linear-system helpers behind the classifier zoo.
// Exposed so gradients and solver residuals can be checked independently.

#include "genflow/model.hpp"

#include <span>

namespace genflow {

/// K(a_i, b_j) = exp(-gamma * ||a_i - b_j||^2).
Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma);

struct LsSvmSolution {
    Vector alpha;
    double bias = 0.0;
};

/// Solves [0, y^T; y, Omega + lambda I] [b; alpha] = [0; 1] with
/// Omega_kl = y_k y_l K_kl, via one Cholesky factorization of Omega + lambda I.
LsSvmSolution solve_lssvm(const Matrix& kernel, const Vector& signs, double lambda);

/// Normwise backward error ||r|| / (||A|| ||x|| + ||rhs||) of the full bordered system.
double lssvm_relative_residual(const Matrix& kernel, const Vector& signs, double lambda,
                               const LsSvmSolution& solution);

/// Mean logistic loss + (l2 / 2) ||w||^2 with theta = [intercept, w].
/// Labels are 0/1. Writes the gradient when `grad` is non-null.
double logistic_objective(const Matrix& x, std::span<const int> labels, double l2,
                          const Vector& theta, Vector* grad);

/// Mean softmax cross-entropy + (l2 / 2) ||B without intercepts||^2.
/// coefficients: classes x (1 + d), column 0 the intercept.
double multinomial_objective(const Matrix& x, std::span<const int> labels, int classes,
                             double l2, const Matrix& coefficients, Matrix* grad);

/// Mean cross-entropy of the one-hidden-layer network (tanh hidden units,
/// sigmoid output for two classes, softmax otherwise). The scaler in `net` is
/// ignored: `x` is taken as already standardized.
double neural_net_objective(const Matrix& x, std::span<const int> labels, int classes,
                            const NeuralNetParams& net, NeuralNetParams* grad);

/// Mean logistic loss of raw margins against 0/1 labels.
double logistic_loss(std::span<const double> margins, std::span<const int> labels);

/// Raw additive margin F(x) of a boosted ensemble, for every row.
Vector boosted_margins(const BoostedParams& model, const Matrix& x);

}  // namespace genflow
