#include "families.hpp"
#include "genflow/error.hpp"
#include "genflow/objectives.hpp"
#include "genflow/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

namespace genflow {

double RegressionTree::predict(const double* row, Eigen::Index stride) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const auto& node = nodes[static_cast<std::size_t>(at)];
        at = row[node.feature * stride] < node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
}

const double* ClassificationTree::predict(const double* row, Eigen::Index stride,
                                          int num_classes) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const auto& node = nodes[static_cast<std::size_t>(at)];
        at = row[node.feature * stride] < node.threshold ? node.left : node.right;
    }
    return distributions.data() +
           static_cast<std::size_t>(nodes[static_cast<std::size_t>(at)].leaf) *
               static_cast<std::size_t>(num_classes);
}

double logistic_loss(std::span<const double> margins, std::span<const int> labels) {
    double loss = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double z = margins[i];
        const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - labels[i] * z;
    }
    return loss / static_cast<double>(margins.size());
}

Vector boosted_margins(const BoostedParams& model, const Matrix& x) {
    Vector f = Vector::Constant(x.rows(), model.base_score);
    for (const auto& tree : model.trees) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) f[i] += tree.predict(x.data() + i, x.rows());
    }
    return f;
}

namespace detail {

namespace {

constexpr int kMaxBins = 256;
constexpr double kMaxLeafValue = 8.0;

// Features quantized to at most 256 bins; bin b holds values in [cut[b-1], cut[b]).
struct BinnedFeatures {
    std::vector<std::vector<double>> cuts;
    std::vector<std::uint8_t> bins;  // column-major, n x d
    Eigen::Index n = 0;

    int bin_count(std::size_t f) const { return static_cast<int>(cuts[f].size()) + 1; }
    std::uint8_t at(std::size_t row, std::size_t f) const {
        return bins[f * static_cast<std::size_t>(n) + row];
    }
};

BinnedFeatures bin_features(const Matrix& x) {
    BinnedFeatures b;
    b.n = x.rows();
    b.cuts.resize(static_cast<std::size_t>(x.cols()));
    b.bins.resize(static_cast<std::size_t>(x.rows() * x.cols()));
    std::vector<double> sorted(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        std::copy(x.col(f).begin(), x.col(f).end(), sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> uniq(sorted);
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        auto& cuts = b.cuts[static_cast<std::size_t>(f)];
        if (uniq.size() <= kMaxBins) {
            for (std::size_t u = 1; u < uniq.size(); ++u) cuts.push_back(0.5 * (uniq[u - 1] + uniq[u]));
        } else {
            for (int q = 1; q < kMaxBins; ++q) {
                const double v = sorted[static_cast<std::size_t>(q) * sorted.size() / kMaxBins];
                const auto it = std::lower_bound(uniq.begin(), uniq.end(), v);
                if (it == uniq.begin()) continue;
                const double cut = 0.5 * (*(it - 1) + *it);
                if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
            }
        }
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const auto pos = std::upper_bound(cuts.begin(), cuts.end(), x(i, f)) - cuts.begin();
            b.bins[static_cast<std::size_t>(f * x.rows() + i)] = static_cast<std::uint8_t>(pos);
        }
    }
    return b;
}

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    int bin = -1;  // rows with bin <= this go left
};

struct GrowingLeaf {
    std::vector<std::uint32_t> rows;
    int node = 0;
    SplitChoice split;
};

SplitChoice best_residual_split(const BinnedFeatures& bf, const std::vector<std::uint32_t>& rows,
                                const std::vector<double>& residual, std::size_t min_leaf) {
    SplitChoice best;
    if (rows.size() < 2 * min_leaf) return best;
    double total = 0.0;
    for (auto r : rows) total += residual[r];
    const auto n = static_cast<double>(rows.size());
    const double parent = total * total / n;
    std::vector<double> sum(kMaxBins);
    std::vector<std::size_t> count(kMaxBins);
    for (std::size_t f = 0; f < bf.cuts.size(); ++f) {
        const int nb = bf.bin_count(f);
        if (nb < 2) continue;
        std::fill(sum.begin(), sum.begin() + nb, 0.0);
        std::fill(count.begin(), count.begin() + nb, 0);
        for (auto r : rows) {
            const auto b = bf.at(r, f);
            sum[b] += residual[r];
            ++count[b];
        }
        double left_sum = 0.0;
        std::size_t left_n = 0;
        for (int b = 0; b < nb - 1; ++b) {
            left_sum += sum[static_cast<std::size_t>(b)];
            left_n += count[static_cast<std::size_t>(b)];
            if (left_n < min_leaf) continue;
            const std::size_t right_n = rows.size() - left_n;
            if (right_n < min_leaf) break;
            const double right_sum = total - left_sum;
            const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                                right_sum * right_sum / static_cast<double>(right_n) - parent;
            if (gain > best.gain + 1e-12) {
                best = {gain, static_cast<int>(f), b};
            }
        }
    }
    return best;
}

// Newton step for one leaf, shrunk and halved until the leaf's loss does not increase.
double leaf_value(const std::vector<std::uint32_t>& rows, const std::vector<double>& margin,
                  std::span<const int> labels, double learning_rate) {
    double g = 0.0, h = 0.0;
    for (auto r : rows) {
        const double p = sigmoid(margin[r]);
        g += labels[r] - p;
        h += p * (1.0 - p);
    }
    if (h < 1e-12) return 0.0;
    double value = std::clamp(learning_rate * g / h, -kMaxLeafValue, kMaxLeafValue);
    auto loss_at = [&](double v) {
        double loss = 0.0;
        for (auto r : rows) {
            const double z = margin[r] + v;
            loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - labels[r] * z;
        }
        return loss;
    };
    const double base = loss_at(0.0);
    for (int i = 0; i < 20; ++i) {
        if (loss_at(value) <= base) return value;
        value *= 0.5;
    }
    return 0.0;
}

RegressionTree grow_regression_tree(const BinnedFeatures& bf, const std::vector<double>& residual,
                                    const std::vector<double>& margin, std::span<const int> labels,
                                    int max_leaves, std::size_t min_leaf, double learning_rate) {
    RegressionTree tree;
    tree.nodes.emplace_back();
    std::vector<GrowingLeaf> leaves(1);
    leaves[0].rows.resize(static_cast<std::size_t>(bf.n));
    std::iota(leaves[0].rows.begin(), leaves[0].rows.end(), 0u);
    leaves[0].split = best_residual_split(bf, leaves[0].rows, residual, min_leaf);

    while (static_cast<int>(leaves.size()) < max_leaves) {
        std::size_t pick = leaves.size();
        double best_gain = 0.0;
        for (std::size_t l = 0; l < leaves.size(); ++l) {
            if (leaves[l].split.feature >= 0 && leaves[l].split.gain > best_gain) {
                best_gain = leaves[l].split.gain;
                pick = l;
            }
        }
        if (pick == leaves.size()) break;

        GrowingLeaf parent = std::move(leaves[pick]);
        const auto f = static_cast<std::size_t>(parent.split.feature);
        GrowingLeaf left, right;
        for (auto r : parent.rows) {
            (bf.at(r, f) <= parent.split.bin ? left.rows : right.rows).push_back(r);
        }
        left.node = static_cast<int>(tree.nodes.size());
        right.node = left.node + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(parent.node)];
        node.feature = parent.split.feature;
        node.threshold = bf.cuts[f][static_cast<std::size_t>(parent.split.bin)];
        node.left = left.node;
        node.right = right.node;
        left.split = best_residual_split(bf, left.rows, residual, min_leaf);
        right.split = best_residual_split(bf, right.rows, residual, min_leaf);
        leaves[pick] = std::move(left);
        leaves.push_back(std::move(right));
    }
    for (const auto& leaf : leaves) {
        tree.nodes[static_cast<std::size_t>(leaf.node)].value =
            leaf_value(leaf.rows, margin, labels, learning_rate);
    }
    return tree;
}

}  // namespace

BoostedParams fit_boosted(const FitInput& in, FitDiagnostics& diag) {
    const int max_leaves = static_cast<int>(in.spec.get("leaves", 20));
    const double learning_rate = in.spec.get("learning_rate", 0.2);
    const int tree_count = static_cast<int>(in.spec.get("trees", 100));
    const auto min_leaf = static_cast<std::size_t>(in.spec.get("min_leaf_samples", 10));

    const auto n = static_cast<std::size_t>(in.x.rows());
    BoostedParams model;
    double positives = 0;
    for (int y : in.labels) positives += y;
    const double prior = std::clamp(positives / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(prior / (1.0 - prior));

    const BinnedFeatures bf = bin_features(in.x);
    std::vector<double> margin(n, model.base_score);
    std::vector<double> residual(n);
    for (int t = 0; t < tree_count; ++t) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = in.labels[i] - sigmoid(margin[i]);
        auto tree = grow_regression_tree(bf, residual, margin, in.labels, max_leaves, min_leaf,
                                         learning_rate);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += tree.predict(in.x.data() + i, in.x.rows());
        }
        model.trees.push_back(std::move(tree));
    }
    diag.iterations = tree_count;
    diag.iteration_cap = tree_count;
    return model;
}

Vector score_boosted(const BoostedParams& model, const Matrix& x) {
    Vector f = boosted_margins(model, x);
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = sigmoid(f[i]);
    return f;
}

namespace {

struct ForestBuilder {
    const Matrix& x;
    std::span<const int> labels;
    int classes;
    int split_count;
    int max_depth;
    Rng rng;
    ClassificationTree tree;

    void make_leaf(int node, const std::vector<std::uint32_t>& rows) {
        auto& n = tree.nodes[static_cast<std::size_t>(node)];
        n.feature = -1;
        n.leaf = static_cast<int>(tree.distributions.size() / static_cast<std::size_t>(classes));
        std::vector<double> dist(static_cast<std::size_t>(classes), 0.0);
        for (auto r : rows) dist[static_cast<std::size_t>(labels[r])] += 1.0;
        for (auto& v : dist) v /= static_cast<double>(rows.size());
        tree.distributions.insert(tree.distributions.end(), dist.begin(), dist.end());
    }

    static double gini_mass(const std::vector<double>& counts, double n) {
        if (n == 0.0) return 0.0;
        double sq = 0.0;
        for (double c : counts) sq += c * c;
        return n - sq / n;  // n * (1 - sum p^2)
    }

    void grow(int node, std::vector<std::uint32_t> rows, int depth) {
        std::vector<double> counts(static_cast<std::size_t>(classes), 0.0);
        for (auto r : rows) counts[static_cast<std::size_t>(labels[r])] += 1.0;
        const auto n = static_cast<double>(rows.size());
        const double parent_impurity = gini_mass(counts, n);
        if (depth >= max_depth || rows.size() < 2 || parent_impurity <= 1e-12) {
            make_leaf(node, rows);
            return;
        }
        const auto d = static_cast<std::size_t>(x.cols());
        const auto stride = x.rows();
        const double* data = x.data();
        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        for (std::size_t f = 0; f < d; ++f) {
            const double* col = data + static_cast<Eigen::Index>(f) * stride;
            for (auto r : rows) {
                lo[f] = std::min(lo[f], col[r]);
                hi[f] = std::max(hi[f], col[r]);
            }
        }
        std::vector<std::size_t> usable;
        for (std::size_t f = 0; f < d; ++f) {
            if (hi[f] > lo[f]) usable.push_back(f);
        }
        if (usable.empty()) {
            make_leaf(node, rows);
            return;
        }

        double best_impurity = parent_impurity - 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<double> left(static_cast<std::size_t>(classes));
        std::vector<double> right(static_cast<std::size_t>(classes));
        for (int s = 0; s < split_count; ++s) {
            const std::size_t f = usable[rng.uniform_index(usable.size())];
            double t = rng.uniform(lo[f], hi[f]);
            if (t <= lo[f]) t = std::nextafter(lo[f], hi[f]);
            const double* col = data + static_cast<Eigen::Index>(f) * stride;
            std::fill(left.begin(), left.end(), 0.0);
            double left_n = 0.0;
            for (auto r : rows) {
                if (col[r] < t) {
                    left[static_cast<std::size_t>(labels[r])] += 1.0;
                    left_n += 1.0;
                }
            }
            if (left_n == 0.0 || left_n == n) continue;
            for (std::size_t c = 0; c < right.size(); ++c) right[c] = counts[c] - left[c];
            const double impurity = gini_mass(left, left_n) + gini_mass(right, n - left_n);
            if (impurity < best_impurity) {
                best_impurity = impurity;
                best_feature = static_cast<int>(f);
                best_threshold = t;
            }
        }
        if (best_feature < 0) {
            make_leaf(node, rows);
            return;
        }
        std::vector<std::uint32_t> left_rows, right_rows;
        const double* col = data + static_cast<Eigen::Index>(best_feature) * stride;
        for (auto r : rows) (col[r] < best_threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int left_node = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& n_ref = tree.nodes[static_cast<std::size_t>(node)];
        n_ref.feature = best_feature;
        n_ref.threshold = best_threshold;
        n_ref.left = left_node;
        n_ref.right = left_node + 1;
        grow(left_node, std::move(left_rows), depth + 1);
        grow(left_node + 1, std::move(right_rows), depth + 1);
    }
};

}  // namespace

ForestParams fit_forest(const FitInput& in, FitDiagnostics& diag) {
    const int split_count = static_cast<int>(in.spec.get("split_count", 128));
    const int max_depth = static_cast<int>(in.spec.get("depth", 32));
    const int ensemble = static_cast<int>(in.spec.get("ensemble_count", 8));
    const auto n = static_cast<std::size_t>(in.x.rows());

    ForestParams forest;
    for (int t = 0; t < ensemble; ++t) {
        ForestBuilder builder{in.x, in.labels, in.classes, split_count, max_depth,
                              Rng(derive_seed(in.spec.seed, static_cast<std::uint64_t>(t))), {}};
        // Bagging: bootstrap sample of the training rows.
        std::vector<std::uint32_t> rows(n);
        for (auto& r : rows) r = static_cast<std::uint32_t>(builder.rng.uniform_index(n));
        std::sort(rows.begin(), rows.end());
        builder.tree.nodes.emplace_back();
        builder.grow(0, std::move(rows), 0);
        forest.trees.push_back(std::move(builder.tree));
    }
    diag.iterations = ensemble;
    diag.iteration_cap = ensemble;
    return forest;
}

Matrix score_forest(const ForestParams& model, const Matrix& x, int classes) {
    Matrix out = Matrix::Zero(x.rows(), classes);
    for (const auto& tree : model.trees) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double* dist = tree.predict(x.data() + i, x.rows(), classes);
            for (int c = 0; c < classes; ++c) out(i, c) += dist[c];
        }
    }
    out /= static_cast<double>(model.trees.size());
    return out;
}

}  // namespace detail
}  // namespace genflow
