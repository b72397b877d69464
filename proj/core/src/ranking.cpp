#include "genflow/ranking.hpp"

#include "genflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

namespace genflow {

namespace {

void require_bins(int bin_count) {
    if (bin_count < 2) throw ConfigError("bin_count must be at least 2");
}

std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

RankedFeatures finish(RankingMethod method, std::vector<double> scores, const Dataset& train,
                      int bin_count) {
    RankedFeatures r;
    r.method = method;
    r.order = descending_order(scores);
    r.scores = std::move(scores);
    r.feature_names = train.feature_names;
    r.bin_count = bin_count;
    return r;
}

double fisher_one(const Eigen::Ref<const Vector>& x, const std::vector<int>& labels,
                  int positive_class) {
    double sum1 = 0, sum0 = 0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == positive_class) {
            sum1 += x[static_cast<Eigen::Index>(i)];
            ++n1;
        } else {
            sum0 += x[static_cast<Eigen::Index>(i)];
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) throw DataError("fisher score: one class side is empty");
    const double mu1 = sum1 / static_cast<double>(n1);
    const double mu0 = sum0 / static_cast<double>(n0);
    double ss1 = 0, ss0 = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v = x[static_cast<Eigen::Index>(i)];
        if (labels[i] == positive_class) {
            ss1 += (v - mu1) * (v - mu1);
        } else {
            ss0 += (v - mu0) * (v - mu0);
        }
    }
    const double pooled = ss1 / static_cast<double>(n1) + ss0 / static_cast<double>(n0);
    const double gap = (mu1 - mu0) * (mu1 - mu0);
    if (pooled == 0.0) return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return gap / pooled;
}

// 2x2 statistic for each occupied bin of `bins` against the event label == positive.
double chi_squared_one(const std::vector<int>& bins, int bin_count, const std::vector<int>& labels,
                       int positive_class) {
    const auto n = static_cast<double>(labels.size());
    std::vector<double> pos(static_cast<std::size_t>(bin_count), 0.0);
    std::vector<double> all(static_cast<std::size_t>(bin_count), 0.0);
    double total_pos = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto b = static_cast<std::size_t>(bins[i]);
        all[b] += 1;
        if (labels[i] == positive_class) {
            pos[b] += 1;
            total_pos += 1;
        }
    }
    const double p_y1 = total_pos / n;
    const double p_y0 = 1.0 - p_y1;
    double stat = 0.0;
    for (std::size_t b = 0; b < all.size(); ++b) {
        if (all[b] == 0) continue;
        const double p_x = all[b] / n;
        const double p_not_x = 1.0 - p_x;
        const double denom = p_x * p_not_x * p_y1 * p_y0;
        if (denom <= 0.0) continue;
        const double x_y1 = pos[b] / n;
        const double x_y0 = (all[b] - pos[b]) / n;
        const double notx_y1 = (total_pos - pos[b]) / n;
        const double notx_y0 = ((n - total_pos) - (all[b] - pos[b])) / n;
        const double cross = x_y1 * notx_y0 - x_y0 * notx_y1;
        stat += n * cross * cross / denom;
    }
    return stat;
}

}  // namespace

std::string_view to_string(RankingMethod method) {
    switch (method) {
        case RankingMethod::fisher: return "fisher";
        case RankingMethod::mutual_info: return "mutual_info";
        case RankingMethod::chi_squared: return "chi_squared";
        case RankingMethod::mrmr: return "mrmr";
    }
    return "unknown";
}

RankingMethod parse_ranking_method(std::string_view name) {
    if (name == "fisher") return RankingMethod::fisher;
    if (name == "mutual_info" || name == "mi") return RankingMethod::mutual_info;
    if (name == "chi_squared" || name == "chi2") return RankingMethod::chi_squared;
    if (name == "mrmr") return RankingMethod::mrmr;
    throw ConfigError("unknown ranking method '" + std::string(name) + "'");
}

std::vector<std::vector<int>> discretize(const Matrix& features, int bin_count) {
    require_bins(bin_count);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        const auto col = features.col(j);
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        auto& bins = out[static_cast<std::size_t>(j)];
        bins.resize(static_cast<std::size_t>(features.rows()), 0);
        if (hi <= lo) continue;
        const double width = (hi - lo) / bin_count;
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            const int b = static_cast<int>(std::floor((col[i] - lo) / width));
            bins[static_cast<std::size_t>(i)] = std::clamp(b, 0, bin_count - 1);
        }
    }
    return out;
}

double mutual_information_of(const std::vector<int>& a, int a_levels, const std::vector<int>& b,
                             int b_levels) {
    const auto n = static_cast<double>(a.size());
    std::vector<double> joint(static_cast<std::size_t>(a_levels * b_levels), 0.0);
    std::vector<double> pa(static_cast<std::size_t>(a_levels), 0.0);
    std::vector<double> pb(static_cast<std::size_t>(b_levels), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[static_cast<std::size_t>(a[i] * b_levels + b[i])] += 1.0;
        pa[static_cast<std::size_t>(a[i])] += 1.0;
        pb[static_cast<std::size_t>(b[i])] += 1.0;
    }
    double mi = 0.0;
    for (int x = 0; x < a_levels; ++x) {
        for (int y = 0; y < b_levels; ++y) {
            const double count = joint[static_cast<std::size_t>(x * b_levels + y)];
            if (count == 0.0) continue;
            const double pxy = count / n;
            mi += pxy * std::log(count * n / (pa[static_cast<std::size_t>(x)] *
                                              pb[static_cast<std::size_t>(y)]));
        }
    }
    return std::max(0.0, mi);
}

RankedFeatures fisher_score(const Dataset& train, int positive_class) {
    if (positive_class < 0 || positive_class >= train.num_classes()) {
        throw ConfigError("fisher score: positive class out of range");
    }
    std::vector<double> scores(train.cols());
    for (std::size_t j = 0; j < train.cols(); ++j) {
        scores[j] = fisher_one(train.features.col(static_cast<Eigen::Index>(j)), train.labels,
                               positive_class);
    }
    return finish(RankingMethod::fisher, std::move(scores), train, 0);
}

RankedFeatures fisher_score(const Dataset& train) {
    if (train.num_classes() == 2) return fisher_score(train, 1);
    std::vector<double> scores(train.cols(), 0.0);
    const auto counts = train.class_counts();
    for (int c = 0; c < train.num_classes(); ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0 ||
            counts[static_cast<std::size_t>(c)] == train.rows()) {
            continue;
        }
        for (std::size_t j = 0; j < train.cols(); ++j) {
            scores[j] = std::max(
                scores[j], fisher_one(train.features.col(static_cast<Eigen::Index>(j)),
                                      train.labels, c));
        }
    }
    return finish(RankingMethod::fisher, std::move(scores), train, 0);
}

RankedFeatures mutual_information(const Dataset& train, int bin_count) {
    const auto bins = discretize(train.features, bin_count);
    std::vector<double> scores(train.cols());
    for (std::size_t j = 0; j < train.cols(); ++j) {
        scores[j] = mutual_information_of(bins[j], bin_count, train.labels, train.num_classes());
    }
    return finish(RankingMethod::mutual_info, std::move(scores), train, bin_count);
}

RankedFeatures chi_squared(const Dataset& train, int bin_count) {
    const auto bins = discretize(train.features, bin_count);
    std::vector<double> scores(train.cols(), 0.0);
    for (std::size_t j = 0; j < train.cols(); ++j) {
        if (train.num_classes() == 2) {
            scores[j] = chi_squared_one(bins[j], bin_count, train.labels, 1);
        } else {
            for (int c = 0; c < train.num_classes(); ++c) {
                scores[j] += chi_squared_one(bins[j], bin_count, train.labels, c);
            }
        }
    }
    return finish(RankingMethod::chi_squared, std::move(scores), train, bin_count);
}

RankedFeatures mrmr_rank(const Dataset& train, int bin_count, std::size_t k,
                         double redundancy_weight) {
    const std::size_t d = train.cols();
    if (k < 1 || k > d) throw ConfigError("mrmr: k must lie in 1..d");
    const auto bins = discretize(train.features, bin_count);
    std::vector<double> relevance(d);
    for (std::size_t j = 0; j < d; ++j) {
        relevance[j] = mutual_information_of(bins[j], bin_count, train.labels, train.num_classes());
    }

    std::vector<double> redundancy_sum(d, 0.0);
    std::vector<bool> chosen(d, false);
    std::vector<double> scores(relevance);
    RankedFeatures r;
    r.method = RankingMethod::mrmr;
    r.feature_names = train.feature_names;
    r.bin_count = bin_count;
    for (std::size_t step = 0; step < k; ++step) {
        std::size_t best = d;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d; ++j) {
            if (chosen[j]) continue;
            const double mean_red =
                step == 0 ? 0.0 : redundancy_sum[j] / static_cast<double>(step);
            const double criterion = relevance[j] - redundancy_weight * mean_red;
            scores[j] = criterion;
            if (criterion > best_score) {
                best_score = criterion;
                best = j;
            }
        }
        chosen[best] = true;
        r.order.push_back(best);
        for (std::size_t j = 0; j < d; ++j) {
            if (!chosen[j]) {
                redundancy_sum[j] += mutual_information_of(bins[j], bin_count, bins[best], bin_count);
            }
        }
    }
    // Unselected features keep their criterion against the final selected set.
    for (std::size_t j = 0; j < d; ++j) {
        if (!chosen[j]) {
            scores[j] = relevance[j] - redundancy_weight * redundancy_sum[j] / static_cast<double>(k);
        }
    }
    r.scores = std::move(scores);
    return r;
}

RankedFeatures rank_features(const Dataset& train, RankingMethod method, int bin_count) {
    switch (method) {
        case RankingMethod::fisher: return fisher_score(train);
        case RankingMethod::mutual_info: return mutual_information(train, bin_count);
        case RankingMethod::chi_squared: return chi_squared(train, bin_count);
        case RankingMethod::mrmr: return mrmr_rank(train, bin_count, train.cols());
    }
    throw ConfigError("unknown ranking method");
}

Dataset project_top_k(const Dataset& data, const RankedFeatures& ranking, std::size_t k) {
    if (ranking.feature_names != data.feature_names) {
        throw DataError("project_top_k: ranking was computed on a different feature schema");
    }
    if (k < 1 || k > ranking.order.size()) {
        throw ConfigError("project_top_k: k=" + std::to_string(k) + " outside 1.." +
                          std::to_string(ranking.order.size()));
    }
    return data.select_columns(std::span(ranking.order).first(k));
}

void write_ranking_csv(const RankedFeatures& ranking, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "feature_name,score\n" << std::setprecision(17);
    for (std::size_t j : ranking.order) {
        out << ranking.feature_names[j] << ',' << ranking.scores[j] << '\n';
    }
}

}  // namespace genflow
