#pragma once

#include "genflow/dataset.hpp"
#include "genflow/metrics.hpp"
#include "genflow/model.hpp"
#include "genflow/ranking.hpp"
#include "genflow/selection.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace genflow {

// ---- hierarchy ------------------------------------------------------------

struct HierarchyLevel {
    std::string name;
    std::vector<int> positive;
    std::vector<int> negative;
};

struct HierarchySpec {
    std::vector<HierarchyLevel> levels;
};

/// JSON: [{"name": "...", "positive": [ids], "negative": [ids]}, ...]
/// (an object with a "levels" array is accepted too).
HierarchySpec parse_hierarchy(std::string_view text);
HierarchySpec load_hierarchy(const std::filesystem::path& path);
/// Throws ConfigError for empty/overlapping sets or ids outside 0..C-1.
void validate_hierarchy(const HierarchySpec& spec, int num_classes);

/// Unweighted mean of per-level rates.
Rates combine_levels(std::span<const Rates> levels);

// ---- configuration -----------------------------------------------------------

enum class Route { binary, multiclass_flat, multiclass_hierarchical };
enum class Decision3Metric { recall, accuracy };

std::string_view to_string(Route route);
std::string_view to_string(Decision3Metric metric);
Decision3Metric parse_decision3_metric(std::string_view name);

struct FlowConfig {
    // input (used by the CLI; run_flow takes the loaded dataset)
    std::filesystem::path data_path;
    std::string label_column;
    char delimiter = ',';
    NaPolicy na_policy = NaPolicy::fail;
    std::filesystem::path output_dir;
    std::filesystem::path hierarchy_path;

    double train_fraction = 0.30;
    int fold_count = 5;
    bool folds_positional = false;
    std::uint64_t seed = 0;
    std::vector<std::string> families;  // empty: every family applicable to the route
    GridPreset grid = GridPreset::full;
    std::vector<RankingMethod> rankers = {RankingMethod::fisher, RankingMethod::mutual_info,
                                          RankingMethod::chi_squared};
    int bin_count = kDefaultBinCount;
    std::optional<HierarchySpec> hierarchy;
    Decision3Metric decision3_metric = Decision3Metric::recall;
    unsigned threads = 0;  // 0: one per hardware thread
};

/// Candidate names tried by Decision 2 for a binary or multi-class route.
std::vector<std::string> default_candidates(bool binary);

// ---- report -----------------------------------------------------------------

struct DecisionRecord {
    std::string stage;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::string outcome;
};

struct CandidateResult {
    std::string name;
    int complexity = 0;
    bool failed = false;
    std::string error;
    SweepResult sweep;
};

/// One classification task: the whole data set, or one hierarchy level.
struct TaskResult {
    std::string name;
    std::vector<std::string> class_names;
    std::vector<std::int64_t> train_counts;
    std::vector<std::int64_t> test_counts;
    std::uint64_t fold_seed = 0;
    std::vector<RankedFeatures> rankings;
    std::vector<CandidateResult> leaderboard;
    std::size_t winner = 0;
    DimSweepResult dims;
    std::vector<std::string> selected_features;
    TrainedModel model;  // winner refitted on the full train side with the selected features
    std::optional<EvalMetrics> cv_metrics;  // out-of-fold, training side only
    EvalMetrics test_metrics;
    bool scored = false;
};

struct FlowReport {
    FlowConfig config;
    std::string source_id;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::string> class_names;
    std::vector<std::int64_t> class_counts;
    std::uint64_t split_seed = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<std::string> split_warnings;

    Route route = Route::binary;
    TaskResult main;                 // binary task or flat multi-class task
    std::vector<TaskResult> levels;  // hierarchy levels, when evaluated
    std::optional<Rates> hierarchy_cv;    // combined level rates used by Decision 3
    std::optional<Rates> hierarchy_test;  // combined level rates on the test side
    std::optional<double> randomized_baseline;
    std::vector<DecisionRecord> trail;
    std::vector<std::string> advisories;
};

// ---- decisions ------------------------------------------------------------

/// true iff the data has exactly two classes.
bool decision_route(const Dataset& data);

/// Index of the winner: best CV accuracy; scores equal to 4 decimals go to the
/// simpler family, then to the earlier candidate. Throws PipelineError when
/// every candidate failed.
std::size_t select_best_model(std::span<const CandidateResult> leaderboard);

/// Sweeps every candidate on `train` and returns the leaderboard.
std::vector<CandidateResult> sweep_candidates(std::span<const std::string> candidates,
                                              const Dataset& train, const FoldPlan& folds,
                                              GridPreset grid, std::uint64_t seed,
                                              unsigned threads = 1);

struct Decision3Outcome {
    bool hierarchical = false;
    bool advisory = false;  // flat below baseline but no hierarchy to try
    std::string reason;
};

/// `flat` and `hierarchical` are the compared values of the chosen metric.
Decision3Outcome decision_hierarchy(double flat, double baseline,
                                    std::optional<double> hierarchical);

/// Metric value Decision 3 compares for a set of rates.
double decision3_value(const Rates& macro, double overall_accuracy, Decision3Metric metric);

// ---- pipeline -------------------------------------------------------------

FlowReport run_flow(const Dataset& data, const FlowConfig& config);
/// Runs on a precomputed split. Only the final scoring stage reads `split.test`.
FlowReport run_flow(const SplitPair& split, const FlowConfig& config);

/// Decision-trail records that precede the final scoring stage.
std::vector<DecisionRecord> trail_before_scoring(const FlowReport& report);

}  // namespace genflow
