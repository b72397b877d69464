#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace genflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Labeled tabular data: an N x d matrix of finite reals plus dense class ids.
///
/// Datasets produced by load_dataset() and make_dataset() satisfy the full
/// invariant set (finite values, every class present, N >= 2, d >= 1, C >= 2).
/// Row subsets keep the class schema of their parent, so a fold or a split side
/// may legitimately miss a rare class.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::string source_id;

    std::size_t rows() const { return labels.size(); }
    std::size_t cols() const { return feature_names.size(); }
    int num_classes() const { return static_cast<int>(class_names.size()); }

    std::vector<std::size_t> class_counts() const;

    Dataset subset(std::span<const std::size_t> row_ids) const;
    Dataset select_columns(std::span<const std::size_t> col_ids) const;
};

/// Builds a dataset and checks the full invariant set. Throws DataError.
Dataset make_dataset(Matrix features, std::vector<int> labels,
                     std::vector<std::string> feature_names,
                     std::vector<std::string> class_names, std::string source_id = {});

/// Throws DataError when `data` breaks an invariant. Density (every class
/// present) is only checked when `require_all_classes` is set.
void validate(const Dataset& data, bool require_all_classes = true);

enum class NaPolicy { fail, drop_row };

struct LoadOptions {
    /// Header name of the label column, or a 0-based column index.
    std::string label_column;
    char delimiter = ',';
    NaPolicy na_policy = NaPolicy::fail;
};

struct LoadSummary {
    std::size_t rows = 0;
    std::size_t dropped_rows = 0;
    std::size_t features = 0;
    std::vector<std::size_t> class_counts;
};

/// Reads a delimited text file whose first row is a header.
///
/// Raw label values are mapped to dense ids 0..C-1 in ascending order
/// (numeric order when every label parses as a number, lexicographic
/// otherwise). Every other column must parse as a finite real; empty cells,
/// "?", "NA" and friends are handled per `na_policy`.
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options,
                     LoadSummary* summary = nullptr);

struct SplitPair {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows;  // row indices into the source dataset
    std::vector<std::size_t> test_rows;
    std::uint64_t seed = 0;
    double train_fraction = 0.30;
    std::vector<std::string> warnings;
};

/// Number of rows of an n-sample class that go to the training side:
/// round-half-up of fraction * n, clamped to [1, n - 1].
std::size_t stratified_train_count(std::size_t class_size, double fraction);

/// Per-class seeded shuffle, first stratified_train_count() rows of each class
/// go to training. Both sides keep the source row order.
SplitPair stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed);

/// Class 0 -> -1, class 1 -> +1. Throws DataError unless C == 2.
std::vector<int> encode_sign_labels(const Dataset& data);
std::vector<int> decode_sign_labels(std::span<const int> signs);

/// Keeps rows whose label is in `positive` or `negative` and relabels them
/// 1 / 0 respectively. Throws DataError if the sets overlap or a set is empty.
Dataset binarize(const Dataset& data, std::span<const int> positive,
                 std::span<const int> negative, std::string positive_name,
                 std::string negative_name);

}  // namespace genflow
