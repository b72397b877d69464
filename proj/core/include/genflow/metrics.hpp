#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace genflow {

/// C x C counts; entry (i, j) = samples of true class i predicted as class j.
class ConfusionCounts {
public:
    explicit ConfusionCounts(int num_classes = 2);

    int num_classes() const { return classes_; }
    std::int64_t at(int truth, int predicted) const {
        return cells_[static_cast<std::size_t>(truth * classes_ + predicted)];
    }
    void add(int truth, int predicted, std::int64_t count = 1);

    std::int64_t total() const;
    std::int64_t trace() const;
    std::int64_t true_count(int c) const;       // row sum
    std::int64_t predicted_count(int c) const;  // column sum

    // One-vs-rest counts for class c (class 1 is "positive" in the binary case).
    std::int64_t tp(int c = 1) const { return at(c, c); }
    std::int64_t fp(int c = 1) const { return predicted_count(c) - at(c, c); }
    std::int64_t fn(int c = 1) const { return true_count(c) - at(c, c); }
    std::int64_t tn(int c = 1) const { return total() - tp(c) - fp(c) - fn(c); }

private:
    int classes_;
    std::vector<std::int64_t> cells_;
};

struct Rates {
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
};

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct EvalMetrics {
    std::vector<Rates> per_class;          // one-vs-rest, indexed by class id
    std::vector<std::int64_t> support;     // true-class counts n^(i)
    Rates micro;                           // frequency-weighted mean of per_class
    Rates macro;                           // unweighted mean of per_class
    Rates positive;                        // class-1 rates (binary tasks)
    double overall_accuracy = 0.0;         // trace / total
    std::vector<RocPoint> roc;
    std::optional<double> auc;
    std::vector<std::string> flags;        // degenerate denominators, single-class ROC, ...
};

ConfusionCounts confusion_counts(std::span<const int> truth, std::span<const int> predicted,
                                 int num_classes);

/// Class-1 precision, recall and accuracy. 0/0 evaluates to 0 and adds a flag.
EvalMetrics binary_metrics(const ConfusionCounts& counts);

/// Per-class one-vs-rest rates with micro (support-weighted) and macro means.
EvalMetrics averaged_metrics(const ConfusionCounts& counts);

/// Threshold grid: 0, 0.01, ..., 1 plus every distinct score, ascending.
std::vector<double> default_thresholds(std::span<const double> scores);

struct RocCurve {
    std::vector<RocPoint> points;  // threshold descending, endpoints (0,0) and (1,1) included
    std::optional<double> auc;
    std::vector<std::string> flags;
};

/// Positive iff score >= threshold. AUC by trapezoids over the sorted points.
RocCurve roc_and_auc(std::span<const double> positive_scores, std::span<const int> truth,
                     std::span<const double> thresholds);
RocCurve roc_and_auc(std::span<const double> positive_scores, std::span<const int> truth);

/// Recall of labelling everything as the most frequent class: max n_i / sum n_i.
double randomized_recall(std::span<const std::int64_t> class_counts);

}  // namespace genflow
