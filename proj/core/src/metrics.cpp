#include "genflow/metrics.hpp"

#include "genflow/error.hpp"

#include <algorithm>
#include <numeric>

namespace genflow {

namespace {

double ratio(std::int64_t num, std::int64_t den, const std::string& what,
             std::vector<std::string>& flags) {
    if (den == 0) {
        flags.push_back(what + ": 0/0");
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts::ConfusionCounts(int num_classes)
    : classes_(num_classes),
      cells_(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(num_classes), 0) {
    if (num_classes < 2) throw ConfigError("confusion counts need at least 2 classes");
}

void ConfusionCounts::add(int truth, int predicted, std::int64_t count) {
    if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_) {
        throw DataError("label out of range in confusion counts");
    }
    cells_[static_cast<std::size_t>(truth * classes_ + predicted)] += count;
}

std::int64_t ConfusionCounts::total() const {
    return std::accumulate(cells_.begin(), cells_.end(), std::int64_t{0});
}

std::int64_t ConfusionCounts::trace() const {
    std::int64_t t = 0;
    for (int c = 0; c < classes_; ++c) t += at(c, c);
    return t;
}

std::int64_t ConfusionCounts::true_count(int c) const {
    std::int64_t s = 0;
    for (int j = 0; j < classes_; ++j) s += at(c, j);
    return s;
}

std::int64_t ConfusionCounts::predicted_count(int c) const {
    std::int64_t s = 0;
    for (int i = 0; i < classes_; ++i) s += at(i, c);
    return s;
}

ConfusionCounts confusion_counts(std::span<const int> truth, std::span<const int> predicted,
                                 int num_classes) {
    if (truth.size() != predicted.size()) {
        throw DataError("confusion counts: " + std::to_string(truth.size()) + " labels vs " +
                        std::to_string(predicted.size()) + " predictions");
    }
    ConfusionCounts counts(num_classes);
    for (std::size_t i = 0; i < truth.size(); ++i) counts.add(truth[i], predicted[i]);
    return counts;
}

EvalMetrics binary_metrics(const ConfusionCounts& counts) {
    if (counts.num_classes() != 2) throw ConfigError("binary metrics need exactly 2 classes");
    EvalMetrics m = averaged_metrics(counts);
    std::vector<std::string> flags;
    const auto tp = counts.at(1, 1);
    const auto tn = counts.at(0, 0);
    const auto fp = counts.at(0, 1);
    const auto fn = counts.at(1, 0);
    m.positive.precision = ratio(tp, tp + fp, "precision", flags);
    m.positive.recall = ratio(tp, tp + fn, "recall", flags);
    m.positive.accuracy = ratio(tp + tn, counts.total(), "accuracy", flags);
    m.flags = std::move(flags);
    return m;
}

EvalMetrics averaged_metrics(const ConfusionCounts& counts) {
    EvalMetrics m;
    const int classes = counts.num_classes();
    const auto total = counts.total();
    m.overall_accuracy = ratio(counts.trace(), total, "overall accuracy", m.flags);
    for (int c = 0; c < classes; ++c) {
        const std::string tag = "[" + std::to_string(c) + "]";
        Rates r;
        r.precision = ratio(counts.tp(c), counts.tp(c) + counts.fp(c), "precision" + tag, m.flags);
        r.recall = ratio(counts.tp(c), counts.tp(c) + counts.fn(c), "recall" + tag, m.flags);
        r.accuracy = ratio(counts.tp(c) + counts.tn(c), total, "accuracy" + tag, m.flags);
        m.per_class.push_back(r);
        m.support.push_back(counts.true_count(c));
    }
    for (int c = 0; c < classes; ++c) {
        const auto& r = m.per_class[static_cast<std::size_t>(c)];
        const double w = total > 0 ? static_cast<double>(m.support[static_cast<std::size_t>(c)]) /
                                         static_cast<double>(total)
                                   : 0.0;
        m.micro.precision += w * r.precision;
        m.micro.recall += w * r.recall;
        m.micro.accuracy += w * r.accuracy;
        m.macro.precision += r.precision / classes;
        m.macro.recall += r.recall / classes;
        m.macro.accuracy += r.accuracy / classes;
    }
    if (classes == 2) m.positive = m.per_class[1];
    return m;
}

std::vector<double> default_thresholds(std::span<const double> scores) {
    std::vector<double> t;
    t.reserve(101 + scores.size());
    for (int i = 0; i <= 100; ++i) t.push_back(i / 100.0);
    for (double s : scores) t.push_back(std::clamp(s, 0.0, 1.0));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

RocCurve roc_and_auc(std::span<const double> positive_scores, std::span<const int> truth,
                     std::span<const double> thresholds) {
    if (positive_scores.size() != truth.size()) {
        throw DataError("roc: score and label counts differ");
    }
    RocCurve curve;
    std::int64_t positives = 0;
    for (int y : truth) {
        if (y != 0 && y != 1) throw DataError("roc: labels must be binary");
        positives += y;
    }
    const auto negatives = static_cast<std::int64_t>(truth.size()) - positives;
    if (positives == 0 || negatives == 0) {
        curve.flags.push_back("roc: single-class labels, AUC undefined");
        return curve;
    }

    // Sweep thresholds from high to low over scores sorted descending.
    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return positive_scores[a] > positive_scores[b];
    });
    std::vector<double> desc(thresholds.begin(), thresholds.end());
    std::sort(desc.begin(), desc.end(), std::greater<>());

    curve.points.push_back({1.0, 0.0, 0.0});
    std::int64_t tp = 0, fp = 0;
    std::size_t next = 0;
    for (double t : desc) {
        while (next < order.size() && positive_scores[order[next]] >= t) {
            (truth[order[next]] == 1 ? tp : fp) += 1;
            ++next;
        }
        curve.points.push_back({t, static_cast<double>(fp) / static_cast<double>(negatives),
                                static_cast<double>(tp) / static_cast<double>(positives)});
    }
    curve.points.push_back({0.0, 1.0, 1.0});

    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    curve.auc = area;
    return curve;
}

RocCurve roc_and_auc(std::span<const double> positive_scores, std::span<const int> truth) {
    const auto thresholds = default_thresholds(positive_scores);
    return roc_and_auc(positive_scores, truth, thresholds);
}

double randomized_recall(std::span<const std::int64_t> class_counts) {
    if (class_counts.empty()) throw DataError("randomized recall: no classes");
    std::int64_t total = 0, best = 0;
    for (auto n : class_counts) {
        if (n < 0) throw DataError("randomized recall: negative count");
        total += n;
        best = std::max(best, n);
    }
    if (total == 0) throw DataError("randomized recall: all counts are zero");
    return static_cast<double>(best) / static_cast<double>(total);
}

}  // namespace genflow
