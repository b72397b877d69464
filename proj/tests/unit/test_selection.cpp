#include "genflow/error.hpp"
#include "genflow/rng.hpp"
#include "genflow/selection.hpp"
#include "../support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <set>

using namespace genflow;
namespace ts = testing_support;

namespace {

ModelSpec spec_of(const std::string& name, Hyperparameters p = {}, std::uint64_t seed = 1) {
    ModelSpec s = ModelSpec::from_name(name);
    s.params = std::move(p);
    s.seed = seed;
    return s;
}

std::size_t count_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

TEST(Folds, PositionalTenByFive) {
    const FoldPlan plan = make_interleaved_folds(10, 5, 0, true);
    for (int k = 0; k < 5; ++k) {
        EXPECT_EQ(plan.validation_rows(k), (std::vector<std::size_t>{static_cast<std::size_t>(k),
                                                                     static_cast<std::size_t>(k + 5)}));
    }
}

TEST(Folds, TwelveByFiveSizes) {
    for (bool positional : {true, false}) {
        const FoldPlan plan = make_interleaved_folds(12, 5, 3, positional);
        std::vector<std::size_t> sizes;
        for (int k = 0; k < 5; ++k) sizes.push_back(plan.validation_rows(k).size());
        EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 2, 2, 2}));
    }
}

TEST(Folds, ShuffledOrderThenModulo) {
    const FoldPlan plan = make_interleaved_folds(23, 4, 77);
    std::vector<std::size_t> order(23);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(77);
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        EXPECT_EQ(plan.assignments[order[pos]], static_cast<int>(pos % 4));
    }
}

TEST(Folds, PartitionForManySeeds) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 7 + seed * 3;
        const FoldPlan plan = make_interleaved_folds(n, 5, seed);
        std::multiset<std::size_t> seen;
        for (int k = 0; k < 5; ++k) {
            const auto va = plan.validation_rows(k);
            const auto tr = plan.training_rows(k);
            EXPECT_FALSE(va.empty());
            EXPECT_EQ(va.size() + tr.size(), n);
            seen.insert(va.begin(), va.end());
        }
        EXPECT_EQ(seen.size(), n);
        EXPECT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), n);
    }
}

TEST(Folds, MoreFoldsThanRowsIsError) {
    EXPECT_THROW(make_interleaved_folds(4, 5, 1), DataError);
    EXPECT_THROW(make_interleaved_folds(10, 1, 1), ConfigError);
}

TEST(Grid, FirstAxisSlowest) {
    Grid g;
    g.axes = {{"a", {1, 2}}, {"b", {10, 20, 30}}};
    ASSERT_EQ(g.size(), 6u);
    EXPECT_EQ(g.point(0), (Hyperparameters{{"a", 1}, {"b", 10}}));
    EXPECT_EQ(g.point(1), (Hyperparameters{{"a", 1}, {"b", 20}}));
    EXPECT_EQ(g.point(3), (Hyperparameters{{"a", 2}, {"b", 10}}));
}

TEST(Grid, DefaultsContainExpectedPoints) {
    const auto nn = default_grid(spec_of("neural_net"), 20);
    bool found = false;
    for (std::size_t p = 0; p < nn.size(); ++p) {
        const auto pt = nn.point(p);
        found |= pt.at("learning_rate") == 0.04 && pt.at("hidden_nodes") == 100;
    }
    EXPECT_TRUE(found);
    EXPECT_EQ(default_grid(spec_of("boosted_tree"), 10).size(), 27u);
    EXPECT_EQ(default_grid(spec_of("lssvm"), 10).size(), 9u);
    EXPECT_EQ(default_grid(spec_of("decision_forest"), 10).size(), 8u);
    EXPECT_EQ(default_grid(spec_of("ova_svm"), 10).size(), 9u);
    EXPECT_EQ(default_grid(spec_of("logreg"), 10).size(), 1u);
    EXPECT_DOUBLE_EQ(default_grid(spec_of("lssvm"), 4).axes[1].second[1], 0.25);
}

TEST(Sweep, SinglePointGrid) {
    const Dataset d = ts::blobs({30, 30}, 2, 2.0, 1);
    const FoldPlan folds = make_interleaved_folds(d, 5, 1);
    Grid g;
    g.axes = {{"l2", {1e-6}}};
    const auto r = sweep_parameters(spec_of("logreg"), g, d, folds);
    ASSERT_EQ(r.table.size(), 1u);
    EXPECT_EQ(r.best_index, 0u);
    EXPECT_EQ(r.cv_accuracy, r.table[0].mean_accuracy);
    EXPECT_EQ(r.table[0].fold_accuracy.size(), 5u);
}

TEST(Sweep, MoreTreesWinOnRingsAgainstExhaustiveOracle) {
    const Dataset d = ts::rings(300, 1, 5);
    const FoldPlan folds = make_interleaved_folds(d, 5, 2);
    Grid g;
    g.axes = {{"trees", {1, 50}}};
    const ModelSpec base = spec_of("boosted_tree", {{"learning_rate", 0.2}});
    const auto r = sweep_parameters(base, g, d, folds);

    // evaluate each point by hand
    double best = -1;
    std::size_t best_point = 0;
    for (std::size_t p = 0; p < 2; ++p) {
        double sum = 0;
        for (int k = 0; k < 5; ++k) {
            ModelSpec s = base;
            s.params["trees"] = p == 0 ? 1 : 50;
            s.seed = derive_seed(s.seed, static_cast<std::uint64_t>(k));
            const auto tr = folds.training_rows(k), va = folds.validation_rows(k);
            const auto m = fit_model(s, d.subset(tr));
            const Dataset v = d.subset(va);
            const auto pred = predict_labels(predict_scores(m, v));
            int hit = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == v.labels[i];
            sum += static_cast<double>(hit) / static_cast<double>(pred.size());
        }
        EXPECT_NEAR(r.table[p].mean_accuracy, sum / 5, 1e-15);
        if (sum / 5 > best) best = sum / 5, best_point = p;
    }
    EXPECT_EQ(r.best_index, best_point);
    EXPECT_EQ(r.best_spec.params.at("trees"), 50);
}

TEST(Sweep, TiesGoToFirstListedPoint) {
    const Dataset d = ts::blobs({20, 20}, 2, 3.0, 4);
    const FoldPlan folds = make_interleaved_folds(d, 4, 1);
    Grid g;
    g.axes = {{"l2", {1e-3, 1e-3, 1e-3}}};
    EXPECT_EQ(sweep_parameters(spec_of("logreg"), g, d, folds).best_index, 0u);
}

TEST(Sweep, FitFailureScoresZeroWithDiagnostic) {
    // class 2 has a single row, so one fold trains without it
    const Dataset d = ts::blobs({12, 12, 1}, 2, 3.0, 4);
    const FoldPlan folds = make_interleaved_folds(d, 5, 1);
    Grid g;
    g.axes = {{"l2", {1e-6}}};
    const auto r = sweep_parameters(spec_of("ova_logreg"), g, d, folds);
    EXPECT_EQ(r.table[0].failed_folds, 1);
    ASSERT_FALSE(r.table[0].diagnostics.empty());
    int zeros = 0;
    for (double a : r.table[0].fold_accuracy) zeros += a == 0.0;
    EXPECT_GE(zeros, 1);
}

TEST(Sweep, InvalidGridPointIsConfigError) {
    const Dataset d = ts::blobs({10, 10}, 2, 1.0, 1);
    const FoldPlan folds = make_interleaved_folds(d, 5, 1);
    Grid g;
    g.axes = {{"trees", {0}}};
    EXPECT_THROW(sweep_parameters(spec_of("boosted_tree"), g, d, folds), ConfigError);
    EXPECT_THROW(sweep_parameters(spec_of("boosted_tree"), Grid{}, d, folds), ConfigError);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    const Dataset d = ts::rings(150, 2, 9);
    const FoldPlan folds = make_interleaved_folds(d, 5, 3);
    const auto g = default_grid(spec_of("decision_forest"), d.cols(), GridPreset::quick);
    const auto a = sweep_parameters(spec_of("decision_forest"), g, d, folds, 1);
    const auto b = sweep_parameters(spec_of("decision_forest"), g, d, folds, 4);
    ASSERT_EQ(a.table.size(), b.table.size());
    for (std::size_t p = 0; p < a.table.size(); ++p) {
        EXPECT_EQ(a.table[p].fold_accuracy, b.table[p].fold_accuracy);
    }
    EXPECT_EQ(a.best_index, b.best_index);
}

TEST(DimSweep, SingleFeature) {
    const Dataset d = ts::blobs({15, 15}, 1, 2.0, 1);
    const FoldPlan folds = make_interleaved_folds(d, 5, 1);
    const std::vector<RankedFeatures> r{fisher_score(d), mutual_information(d), chi_squared(d)};
    const auto res = dimensionality_sweep(spec_of("logreg"), d, folds, r);
    EXPECT_EQ(res.best_k, 1u);
    for (const auto& c : res.curves) EXPECT_EQ(c.accuracy.size(), 1u);
}

TEST(DimSweep, CurvesAndArgmax) {
    const Dataset d = ts::blobs({40, 40}, 6, 0.6, 3);
    const FoldPlan folds = make_interleaved_folds(d, 5, 1);
    const std::vector<RankedFeatures> r{fisher_score(d), mutual_information(d), chi_squared(d)};
    const auto res = dimensionality_sweep(spec_of("logreg"), d, folds, r);
    ASSERT_EQ(res.curves.size(), 3u);
    double top = 0;
    for (const auto& c : res.curves) {
        EXPECT_EQ(c.accuracy.size(), 6u);
        for (double a : c.accuracy) top = std::max(top, a);
        EXPECT_GE(res.best_accuracy, c.accuracy.back());
    }
    EXPECT_EQ(res.best_accuracy, top);
    // smaller k wins ties: no method reaches `top` before best_k
    for (const auto& c : res.curves) {
        for (std::size_t k = 0; k + 1 < res.best_k; ++k) EXPECT_LT(c.accuracy[k], top);
    }
}

TEST(CrossValidated, RowsComeFromHeldOutModels) {
    const Dataset d = ts::blobs({25, 25, 25}, 3, 1.0, 6);
    const FoldPlan folds = make_interleaved_folds(d, 5, 4);
    const ModelSpec s = spec_of("multinomial_logreg");
    const Matrix oof = cross_validated_scores(s, d, folds);
    ModelSpec fold2 = s;
    fold2.seed = derive_seed(s.seed, 2);
    const auto m = fit_model(fold2, d.subset(folds.training_rows(2)));
    const auto va = folds.validation_rows(2);
    const Matrix direct = predict_scores(m, d.subset(va));
    for (std::size_t i = 0; i < va.size(); ++i) {
        EXPECT_TRUE(oof.row(static_cast<Eigen::Index>(va[i])) == direct.row(static_cast<Eigen::Index>(i)));
    }
}

TEST(Export, CsvShapes) {
    const Dataset d = ts::blobs({20, 20}, 3, 1.0, 2);
    const FoldPlan folds = make_interleaved_folds(d, 5, 1);
    const std::vector<RankedFeatures> r{fisher_score(d), chi_squared(d)};
    const auto res = dimensionality_sweep(spec_of("logreg"), d, folds, r);
    const auto dir = ts::scratch_dir("selection_csv");
    write_dimension_csv(res, dir / "dims.csv");
    EXPECT_EQ(count_lines(dir / "dims.csv"), 1u + 2 * 3);
    Grid g;
    g.axes = {{"l2", {1e-6, 1e-2}}};
    write_sweep_csv(sweep_parameters(spec_of("logreg"), g, d, folds), dir / "sweep.csv");
    EXPECT_EQ(count_lines(dir / "sweep.csv"), 3u);
}
