#pragma once

#include "genflow/dataset.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace genflow {

enum class RankingMethod { fisher, mutual_info, chi_squared, mrmr };

std::string_view to_string(RankingMethod method);
RankingMethod parse_ranking_method(std::string_view name);

/// Per-feature scores under one statistic plus the induced order.
///
/// For fisher / mutual_info / chi_squared, `order` sorts features by
/// descending score with ties broken by ascending index. For mrmr it lists
/// the greedily selected features in selection order.
struct RankedFeatures {
    RankingMethod method = RankingMethod::fisher;
    std::vector<double> scores;
    std::vector<std::size_t> order;
    std::vector<std::string> feature_names;
    int bin_count = 0;  // 0 for fisher
};

inline constexpr int kDefaultBinCount = 10;

/// Equal-width bin ids over each feature's observed range. A constant
/// feature lands entirely in bin 0.
std::vector<std::vector<int>> discretize(const Matrix& features, int bin_count);

/// Fisher score of `positive_class` vs the rest, population variances.
/// Zero pooled variance: 0 when the means agree, +infinity otherwise.
RankedFeatures fisher_score(const Dataset& train, int positive_class);

/// Binary data: positive class 1. Multi-class: max over one-vs-rest scores.
RankedFeatures fisher_score(const Dataset& train);

/// Mutual information (natural log) between each binned feature and the label.
RankedFeatures mutual_information(const Dataset& train, int bin_count = kDefaultBinCount);

/// Per-bin 2x2 chi-squared statistic summed over occupied bins; multi-class
/// data sums the one-vs-rest statistics.
RankedFeatures chi_squared(const Dataset& train, int bin_count = kDefaultBinCount);

/// Greedy mRMR (difference form): relevance minus `redundancy_weight` times the
/// mean MI with already selected features. `order` holds k features.
RankedFeatures mrmr_rank(const Dataset& train, int bin_count, std::size_t k,
                         double redundancy_weight = 1.0);

/// Dispatches on method; mrmr ranks every feature.
RankedFeatures rank_features(const Dataset& train, RankingMethod method,
                             int bin_count = kDefaultBinCount);

/// The first k features of ranking.order, rows and labels untouched.
Dataset project_top_k(const Dataset& data, const RankedFeatures& ranking, std::size_t k);

/// Two-column report: feature_name,score (in ranking order).
void write_ranking_csv(const RankedFeatures& ranking, const std::filesystem::path& path);

// Joint-table helpers shared with mRMR.
double mutual_information_of(const std::vector<int>& a, int a_levels, const std::vector<int>& b,
                             int b_levels);

}  // namespace genflow
