#include "families.hpp"
#include "genflow/error.hpp"
#include "genflow/objectives.hpp"

#include <Eigen/Cholesky>

namespace genflow {

namespace {

constexpr double kGradientTolerance = 1e-6;

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double logistic_objective(const Matrix& x, std::span<const int> labels, double l2,
                          const Vector& theta, Vector* grad) {
    const auto n = static_cast<double>(x.rows());
    const auto w = theta.tail(x.cols());
    const Vector z = (x * w).array() + theta[0];
    double loss = 0.0;
    Vector residual(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double y = labels[static_cast<std::size_t>(i)];
        loss += softplus(z[i]) - y * z[i];
        residual[i] = detail::sigmoid(z[i]) - y;
    }
    loss = loss / n + 0.5 * l2 * w.squaredNorm();
    if (grad) {
        grad->resize(theta.size());
        (*grad)[0] = residual.sum() / n;
        grad->tail(x.cols()) = x.transpose() * residual / n + l2 * w;
    }
    return loss;
}

double multinomial_objective(const Matrix& x, std::span<const int> labels, int classes,
                             double l2, const Matrix& coefficients, Matrix* grad) {
    const auto n = static_cast<double>(x.rows());
    const auto weights = coefficients.rightCols(x.cols());
    Matrix logits = x * weights.transpose();
    logits.rowwise() += coefficients.col(0).transpose();
    double loss = 0.0;
    Matrix delta(x.rows(), classes);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double top = logits.row(i).maxCoeff();
        const double lse = top + std::log((logits.row(i).array() - top).exp().sum());
        const int y = labels[static_cast<std::size_t>(i)];
        loss += lse - logits(i, y);
        delta.row(i) = (logits.row(i).array() - lse).exp();
        delta(i, y) -= 1.0;
    }
    loss = loss / n + 0.5 * l2 * weights.squaredNorm();
    if (grad) {
        grad->resize(classes, coefficients.cols());
        grad->col(0) = delta.colwise().sum().transpose() / n;
        grad->rightCols(x.cols()) = delta.transpose() * x / n + l2 * weights;
    }
    return loss;
}

namespace detail {

LogisticParams fit_logreg(const FitInput& in, FitDiagnostics& diag) {
    LogisticParams p;
    p.scaler = Standardizer::fit(in.x);
    const Matrix z = p.scaler.apply(in.x);
    const double l2 = in.spec.get("l2", 1e-6);
    const int cap = static_cast<int>(in.spec.get("max_iterations", 100));
    const auto d = z.cols();
    const auto n = static_cast<double>(z.rows());

    Vector theta = Vector::Zero(d + 1);
    Vector grad;
    double loss = logistic_objective(z, in.labels, l2, theta, &grad);
    diag.iteration_cap = cap;
    diag.converged = false;
    int it = 0;
    for (; it < cap; ++it) {
        if (grad.norm() < kGradientTolerance) {
            diag.converged = true;
            break;
        }
        // Newton direction from the penalized Hessian.
        Matrix hessian = Matrix::Zero(d + 1, d + 1);
        const Vector margin = (z * theta.tail(d)).array() + theta[0];
        Matrix design(z.rows(), d + 1);
        design.col(0).setOnes();
        design.rightCols(d) = z;
        Vector weights(z.rows());
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const double s = sigmoid(margin[i]);
            weights[i] = std::max(s * (1.0 - s), 1e-12);
        }
        hessian.noalias() = design.transpose() * weights.asDiagonal() * design / n;
        hessian.diagonal().tail(d).array() += l2;
        hessian(0, 0) += 1e-12;
        const Vector step = hessian.ldlt().solve(-grad);
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            const Vector candidate = theta + t * step;
            Vector candidate_grad;
            const double candidate_loss =
                logistic_objective(z, in.labels, l2, candidate, &candidate_grad);
            if (candidate_loss <= loss + 1e-4 * t * grad.dot(step)) {
                theta = candidate;
                loss = candidate_loss;
                grad = candidate_grad;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    if (grad.norm() < kGradientTolerance) diag.converged = true;
    diag.iterations = it;
    diag.final_gradient_norm = grad.norm();
    p.intercept = theta[0];
    p.weights = theta.tail(d);
    return p;
}

Vector score_logreg(const LogisticParams& model, const Matrix& x) {
    Vector margin = (model.scaler.apply(x) * model.weights).array() + model.intercept;
    for (Eigen::Index i = 0; i < margin.size(); ++i) margin[i] = sigmoid(margin[i]);
    return margin;
}

MultinomialParams fit_multinomial(const FitInput& in, FitDiagnostics& diag) {
    MultinomialParams p;
    p.scaler = Standardizer::fit(in.x);
    const Matrix z = p.scaler.apply(in.x);
    const double l2 = in.spec.get("l2", 1e-6);
    const int cap = static_cast<int>(in.spec.get("max_iterations", 1000));

    Matrix coef = Matrix::Zero(in.classes, z.cols() + 1);
    Matrix grad;
    double loss = multinomial_objective(z, in.labels, in.classes, l2, coef, &grad);
    double step = 1.0;
    diag.iteration_cap = cap;
    diag.converged = false;
    int it = 0;
    // Gradient descent with Armijo backtracking; the step grows again after each success.
    for (; it < cap; ++it) {
        const double gnorm2 = grad.squaredNorm();
        if (std::sqrt(gnorm2) < kGradientTolerance) {
            diag.converged = true;
            break;
        }
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            const Matrix candidate = coef - step * grad;
            Matrix candidate_grad;
            const double candidate_loss =
                multinomial_objective(z, in.labels, in.classes, l2, candidate, &candidate_grad);
            if (candidate_loss <= loss - 0.5 * step * gnorm2) {
                coef = candidate;
                loss = candidate_loss;
                grad = candidate_grad;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
        step = std::min(step * 2.0, 1e4);
    }
    if (grad.norm() < kGradientTolerance) diag.converged = true;
    diag.iterations = it;
    diag.final_gradient_norm = grad.norm();
    p.coefficients = coef;
    return p;
}

Matrix score_multinomial(const MultinomialParams& model, const Matrix& x) {
    const Matrix z = model.scaler.apply(x);
    Matrix logits = z * model.coefficients.rightCols(z.cols()).transpose();
    logits.rowwise() += model.coefficients.col(0).transpose();
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double top = logits.row(i).maxCoeff();
        logits.row(i) = (logits.row(i).array() - top).exp();
        logits.row(i) /= logits.row(i).sum();
    }
    return logits;
}

}  // namespace detail
}  // namespace genflow
