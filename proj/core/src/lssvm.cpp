#include "families.hpp"
#include "genflow/error.hpp"
#include "genflow/objectives.hpp"

#include <Eigen/Cholesky>

namespace genflow {

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma) {
    const Vector a_sq = a.rowwise().squaredNorm();
    const Vector b_sq = b.rowwise().squaredNorm();
    Matrix k = a * b.transpose();
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
        for (Eigen::Index i = 0; i < k.rows(); ++i) {
            const double dist = std::max(0.0, a_sq[i] + b_sq[j] - 2.0 * k(i, j));
            k(i, j) = std::exp(-gamma * dist);
        }
    }
    return k;
}

namespace {

// H = Omega + lambda I, built in place.
Matrix regularized_omega(const Matrix& kernel, const Vector& signs, double lambda) {
    Matrix h = signs.asDiagonal() * kernel * signs.asDiagonal();
    h.diagonal().array() += lambda;
    return h;
}

LsSvmSolution finish(const Vector& signs, const Vector& eta, const Vector& nu) {
    const double s = signs.dot(eta);
    if (s == 0.0) throw DataError("LS-SVM system is singular");
    LsSvmSolution sol;
    sol.bias = signs.dot(nu) / s;
    sol.alpha = nu - sol.bias * eta;
    return sol;
}

}  // namespace

LsSvmSolution solve_lssvm(const Matrix& kernel, const Vector& signs, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("LS-SVM lambda must be positive");
    const auto n = signs.size();
    Matrix rhs(n, 2);
    rhs.col(0) = signs;
    rhs.col(1).setOnes();

    Matrix h = regularized_omega(kernel, signs, lambda);
    {
        Eigen::LLT<Eigen::Ref<Matrix>> llt(h);
        if (llt.info() == Eigen::Success) {
            const Matrix sol = llt.solve(rhs);
            return finish(signs, sol.col(0), sol.col(1));
        }
    }
    // Numerically indefinite (tiny lambda, near-duplicate rows): pivoted LDL^T.
    h = regularized_omega(kernel, signs, lambda);
    Eigen::LDLT<Matrix> ldlt(h);
    if (ldlt.info() != Eigen::Success) throw DataError("LS-SVM factorization failed");
    const Matrix sol = ldlt.solve(rhs);
    return finish(signs, sol.col(0), sol.col(1));
}

double lssvm_relative_residual(const Matrix& kernel, const Vector& signs, double lambda,
                               const LsSvmSolution& solution) {
    const auto n = signs.size();
    Matrix a(n + 1, n + 1);
    a.setZero();
    a.block(0, 1, 1, n) = signs.transpose();
    a.block(1, 0, n, 1) = signs;
    a.block(1, 1, n, n) = regularized_omega(kernel, signs, lambda);
    Vector x(n + 1);
    x[0] = solution.bias;
    x.tail(n) = solution.alpha;
    Vector rhs = Vector::Ones(n + 1);
    rhs[0] = 0.0;
    const double r = (a * x - rhs).norm();
    return r / (a.norm() * x.norm() + rhs.norm());
}

namespace detail {

LsSvmParams fit_lssvm(const FitInput& in, FitDiagnostics& diag) {
    LsSvmParams p;
    p.scaler = Standardizer::fit(in.x);
    p.support = p.scaler.apply(in.x);
    const double gamma_param = in.spec.get("kernel_gamma", 0.0);
    p.kernel_gamma = gamma_param > 0.0 ? gamma_param : 1.0 / static_cast<double>(in.x.cols());
    p.sign_labels.resize(static_cast<Eigen::Index>(in.labels.size()));
    for (std::size_t i = 0; i < in.labels.size(); ++i) {
        p.sign_labels[static_cast<Eigen::Index>(i)] = in.labels[i] == 1 ? 1.0 : -1.0;
    }
    const Matrix k = rbf_kernel(p.support, p.support, p.kernel_gamma);
    const auto sol = solve_lssvm(k, p.sign_labels, in.spec.get("lambda", 1e-6));
    p.alpha = sol.alpha;
    p.bias = sol.bias;
    diag.iterations = 1;
    diag.iteration_cap = 1;
    return p;
}

Vector score_lssvm(const LsSvmParams& model, const Matrix& x) {
    const Matrix z = model.scaler.apply(x);
    const Vector coef = model.alpha.cwiseProduct(model.sign_labels);
    Vector f(x.rows());
    // Row blocks keep the test-by-support kernel small.
    constexpr Eigen::Index block = 512;
    for (Eigen::Index start = 0; start < z.rows(); start += block) {
        const auto rows = std::min(block, z.rows() - start);
        f.segment(start, rows) =
            rbf_kernel(z.middleRows(start, rows), model.support, model.kernel_gamma) * coef;
    }
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = sigmoid(f[i] + model.bias);
    return f;
}

}  // namespace detail
}  // namespace genflow
