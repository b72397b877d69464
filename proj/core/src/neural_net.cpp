#include "families.hpp"
#include "genflow/error.hpp"
#include "genflow/objectives.hpp"
#include "genflow/rng.hpp"

namespace genflow {

namespace {

int output_units(int classes) { return classes == 2 ? 1 : classes; }

// Output-layer activations: sigmoid column for two classes, softmax rows otherwise.
Matrix activate_outputs(Matrix logits, int classes) {
    if (classes == 2) {
        for (Eigen::Index i = 0; i < logits.rows(); ++i) logits(i, 0) = detail::sigmoid(logits(i, 0));
        return logits;
    }
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double top = logits.row(i).maxCoeff();
        logits.row(i) = (logits.row(i).array() - top).exp();
        logits.row(i) /= logits.row(i).sum();
    }
    return logits;
}

struct Forward {
    Matrix hidden;  // n x L, after tanh
    Matrix logits;  // n x K
};

Forward forward(const Matrix& x, const NeuralNetParams& net) {
    Forward f;
    f.hidden = x * net.hidden_weights.transpose();
    f.hidden.rowwise() += net.hidden_bias.transpose();
    f.hidden = f.hidden.array().tanh();
    f.logits = f.hidden * net.output_weights.transpose();
    f.logits.rowwise() += net.output_bias.transpose();
    return f;
}

}  // namespace

double neural_net_objective(const Matrix& x, std::span<const int> labels, int classes,
                            const NeuralNetParams& net, NeuralNetParams* grad) {
    const auto n = static_cast<double>(x.rows());
    const Forward f = forward(x, net);
    Matrix delta(x.rows(), f.logits.cols());
    double loss = 0.0;
    if (classes == 2) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double z = f.logits(i, 0);
            const double y = labels[static_cast<std::size_t>(i)];
            loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y * z;
            delta(i, 0) = detail::sigmoid(z) - y;
        }
    } else {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double top = f.logits.row(i).maxCoeff();
            const double lse = top + std::log((f.logits.row(i).array() - top).exp().sum());
            const int y = labels[static_cast<std::size_t>(i)];
            loss += lse - f.logits(i, y);
            delta.row(i) = (f.logits.row(i).array() - lse).exp();
            delta(i, y) -= 1.0;
        }
    }
    loss /= n;
    if (grad) {
        delta /= n;
        grad->output_weights = delta.transpose() * f.hidden;
        grad->output_bias = delta.colwise().sum().transpose();
        const Matrix back =
            (delta * net.output_weights).array() * (1.0 - f.hidden.array().square());
        grad->hidden_weights = back.transpose() * x;
        grad->hidden_bias = back.colwise().sum().transpose();
    }
    return loss;
}

namespace detail {

NeuralNetParams fit_neural_net(const FitInput& in, FitDiagnostics& diag) {
    const int hidden = static_cast<int>(in.spec.get("hidden_nodes", 100));
    const double learning_rate = in.spec.get("learning_rate", 0.04);
    const int epochs = static_cast<int>(in.spec.get("epochs", 500));
    const int outputs = output_units(in.classes);

    NeuralNetParams net;
    net.scaler = Standardizer::fit(in.x);
    const Matrix z = net.scaler.apply(in.x);
    Rng rng(in.spec.seed);
    auto init = [&](Eigen::Index rows, Eigen::Index cols) {
        Matrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-0.5, 0.5);
        }
        return m;
    };
    net.hidden_weights = init(hidden, z.cols());
    net.hidden_bias = init(hidden, 1).col(0);
    net.output_weights = init(outputs, hidden);
    net.output_bias = init(outputs, 1).col(0);

    diag.iteration_cap = epochs;
    diag.converged = false;
    NeuralNetParams grad;
    int epoch = 0;
    double gnorm = 0.0;
    for (; epoch < epochs; ++epoch) {
        neural_net_objective(z, in.labels, in.classes, net, &grad);
        gnorm = std::sqrt(grad.hidden_weights.squaredNorm() + grad.hidden_bias.squaredNorm() +
                          grad.output_weights.squaredNorm() + grad.output_bias.squaredNorm());
        if (gnorm < 1e-6) {
            diag.converged = true;
            break;
        }
        net.hidden_weights -= learning_rate * grad.hidden_weights;
        net.hidden_bias -= learning_rate * grad.hidden_bias;
        net.output_weights -= learning_rate * grad.output_weights;
        net.output_bias -= learning_rate * grad.output_bias;
    }
    diag.iterations = epoch;
    diag.final_gradient_norm = gnorm;
    return net;
}

Matrix score_neural_net(const NeuralNetParams& model, const Matrix& x, int classes) {
    const Forward f = forward(model.scaler.apply(x), model);
    Matrix out = activate_outputs(f.logits, classes);
    if (classes != 2) return out;
    Matrix two(x.rows(), 2);
    two.col(1) = out.col(0);
    two.col(0) = 1.0 - out.col(0).array();
    return two;
}

}  // namespace detail
}  // namespace genflow
