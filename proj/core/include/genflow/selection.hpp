#pragma once

#include "genflow/dataset.hpp"
#include "genflow/model.hpp"
#include "genflow/ranking.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace genflow {

/// Fold id per training row. Row j of the shuffled order lands in fold j mod K.
struct FoldPlan {
    int fold_count = 5;
    std::vector<int> assignments;

    std::vector<std::size_t> validation_rows(int fold) const;
    std::vector<std::size_t> training_rows(int fold) const;
};

/// `positional` skips the shuffle, so fold ids follow file order.
FoldPlan make_interleaved_folds(std::size_t rows, int fold_count, std::uint64_t seed,
                                bool positional = false);
FoldPlan make_interleaved_folds(const Dataset& train, int fold_count, std::uint64_t seed,
                                bool positional = false);

/// Ordered hyperparameter axes; the first axis varies slowest and the first
/// listed value of each axis is preferred on ties.
struct Grid {
    std::vector<std::pair<std::string, std::vector<double>>> axes;

    std::size_t size() const;
    Hyperparameters point(std::size_t index) const;
};

enum class GridPreset { full, quick };

std::string_view to_string(GridPreset preset);
GridPreset parse_grid_preset(std::string_view name);

/// Built-in grid for a family (one-vs-all uses its base family's grid).
/// `feature_count` scales the RBF width candidates.
Grid default_grid(const ModelSpec& spec, std::size_t feature_count,
                  GridPreset preset = GridPreset::full);

struct SweepPoint {
    Hyperparameters params;
    double mean_accuracy = 0.0;
    std::vector<double> fold_accuracy;
    int failed_folds = 0;                  // folds whose fit threw; they score 0
    std::vector<std::string> diagnostics;  // fit failures, convergence warnings
};

struct SweepResult {
    ModelSpec best_spec;
    double cv_accuracy = 0.0;
    std::size_t best_index = 0;
    std::vector<SweepPoint> table;  // one row per grid point, grid order
};

/// Mean validation accuracy of every grid point over the folds. `base` supplies
/// the family, seed and any fixed hyperparameters; grid values override them.
SweepResult sweep_parameters(const ModelSpec& base, const Grid& grid, const Dataset& train,
                             const FoldPlan& folds, unsigned threads = 1);

struct DimCurve {
    RankingMethod method = RankingMethod::fisher;
    std::vector<double> accuracy;                    // index k-1
    std::vector<std::vector<double>> fold_accuracy;  // [k-1][fold]
};

struct DimSweepResult {
    RankingMethod best_method = RankingMethod::fisher;
    std::size_t best_k = 0;
    double best_accuracy = 0.0;
    std::vector<DimCurve> curves;  // same order as the rankings argument
};

/// Refits `spec` on the top-k features for k = 1..d under every ranking.
/// Ties go to the smaller k, then to the earlier ranking.
DimSweepResult dimensionality_sweep(const ModelSpec& spec, const Dataset& train,
                                    const FoldPlan& folds,
                                    std::span<const RankedFeatures> rankings,
                                    unsigned threads = 1);

/// Out-of-fold class scores (N x C): row i comes from the model that did not see it.
/// Folds whose fit throws leave uniform scores and append to `failures`.
Matrix cross_validated_scores(const ModelSpec& spec, const Dataset& train,
                              const FoldPlan& folds, unsigned threads = 1,
                              std::vector<std::string>* failures = nullptr);

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);
/// Columns: method,k,mean_cv_accuracy,fold_1..fold_K.
void write_dimension_csv(const DimSweepResult& dims, const std::filesystem::path& path);

}  // namespace genflow
