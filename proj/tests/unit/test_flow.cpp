#include "genflow/error.hpp"
#include "genflow/flow.hpp"
#include "../support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace genflow;
namespace ts = testing_support;

namespace {

CandidateResult candidate(const std::string& name, double cv, bool failed = false) {
    CandidateResult c;
    c.name = name;
    c.complexity = complexity_rank(ModelSpec::from_name(name));
    c.sweep.cv_accuracy = cv;
    c.failed = failed;
    return c;
}

FlowConfig quick_config(std::vector<std::string> families, std::uint64_t seed = 3) {
    FlowConfig cfg;
    cfg.families = std::move(families);
    cfg.grid = GridPreset::quick;
    cfg.seed = seed;
    cfg.threads = 1;
    return cfg;
}

bool same_trail(const std::vector<DecisionRecord>& a, const std::vector<DecisionRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].stage != b[i].stage || a[i].inputs != b[i].inputs || a[i].outcome != b[i].outcome) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(Route, TwoClassesIsBinary) {
    EXPECT_TRUE(decision_route(ts::blobs({5, 5}, 2, 1.0, 1)));
    EXPECT_FALSE(decision_route(ts::blobs({5, 5, 5}, 2, 1.0, 1)));
}

TEST(DecisionTwo, TieAtFourDecimalsGoesToSimpler) {
    const std::vector<CandidateResult> board{candidate("neural_net", 0.91244),
                                             candidate("logreg", 0.91236)};
    EXPECT_EQ(select_best_model(board), 1u);
}

TEST(DecisionTwo, ClearWinnerAndFailures) {
    std::vector<CandidateResult> board{candidate("logreg", 0.90), candidate("neural_net", 0.9125),
                                       candidate("lssvm", 0.99, true)};
    EXPECT_EQ(select_best_model(board), 1u);
    // equal rank and score: the earlier one
    board = {candidate("lssvm", 0.8), candidate("ova_svm", 0.8)};
    EXPECT_EQ(select_best_model(board), 0u);
    board = {candidate("logreg", 0.9, true)};
    EXPECT_THROW(select_best_model(board), PipelineError);
}

TEST(DecisionTwo, ComplexityOrder) {
    auto rank = [](const char* n) { return complexity_rank(ModelSpec::from_name(n)); };
    EXPECT_EQ(rank("logreg"), rank("multinomial_logreg"));
    EXPECT_LT(rank("logreg"), rank("lssvm"));
    EXPECT_EQ(rank("lssvm"), rank("ova_svm"));
    EXPECT_LT(rank("lssvm"), rank("decision_forest"));
    EXPECT_LT(rank("decision_forest"), rank("boosted_tree"));
    EXPECT_EQ(rank("boosted_tree"), rank("ova_boosted_tree"));
    EXPECT_LT(rank("boosted_tree"), rank("neural_net"));
}

TEST(Combiner, FiveLevelMean) {
    const std::vector<Rates> levels{{0.995, 0.998, 0.994},
                                    {0.975, 0.905, 0.957},
                                    {0.727, 0.656, 0.853},
                                    {0.976, 0.993, 0.971},
                                    {0.727, 0.562, 0.717}};
    const Rates r = combine_levels(levels);
    EXPECT_NEAR(r.precision, 4.4 / 5, 1e-12);
    EXPECT_NEAR(r.recall, 4.114 / 5, 1e-12);
    EXPECT_NEAR(r.accuracy, 4.492 / 5, 1e-12);
}

TEST(Combiner, SingleLevelIsIdentity) {
    const std::vector<Rates> one{{0.3, 0.7, 0.9}};
    const Rates r = combine_levels(one);
    EXPECT_EQ(r.precision, 0.3);
    EXPECT_EQ(r.recall, 0.7);
    EXPECT_EQ(r.accuracy, 0.9);
}

TEST(DecisionThree, Cases) {
    auto d = decision_hierarchy(0.618, 0.6878, 0.823);
    EXPECT_TRUE(d.hierarchical);
    EXPECT_FALSE(d.advisory);
    d = decision_hierarchy(0.618, 0.6878, 0.60);
    EXPECT_FALSE(d.hierarchical);
    d = decision_hierarchy(0.618, 0.6878, 0.618);  // strict
    EXPECT_FALSE(d.hierarchical);
    d = decision_hierarchy(0.618, 0.6878, std::nullopt);
    EXPECT_FALSE(d.hierarchical);
    EXPECT_TRUE(d.advisory);
    d = decision_hierarchy(0.95, 1.0 / 3, 0.99);
    EXPECT_FALSE(d.hierarchical);
    EXPECT_FALSE(d.advisory);
}

TEST(DecisionThree, MetricSelector) {
    const Rates macro{0.5, 0.6, 0.7};
    EXPECT_EQ(decision3_value(macro, 0.8, Decision3Metric::recall), 0.6);
    EXPECT_EQ(decision3_value(macro, 0.8, Decision3Metric::accuracy), 0.8);
    EXPECT_EQ(parse_decision3_metric("accuracy"), Decision3Metric::accuracy);
    EXPECT_THROW(parse_decision3_metric("f1"), ConfigError);
}

TEST(Hierarchy, ParseBothForms) {
    const auto a = parse_hierarchy(R"([{"name":"a","positive":[0],"negative":[1,2]}])");
    ASSERT_EQ(a.levels.size(), 1u);
    EXPECT_EQ(a.levels[0].negative, (std::vector<int>{1, 2}));
    const auto b =
        parse_hierarchy(R"({"levels":[{"name":"x","positive":[2],"negative":[0]},
                                      {"name":"y","positive":[1],"negative":[0]}]})");
    EXPECT_EQ(b.levels.size(), 2u);
    EXPECT_THROW(parse_hierarchy("{nope"), ConfigError);
}

TEST(Hierarchy, Validation) {
    HierarchySpec s;
    s.levels = {{"ok", {0}, {1, 2}}};
    EXPECT_NO_THROW(validate_hierarchy(s, 3));
    s.levels = {{"empty", {}, {1}}};
    EXPECT_THROW(validate_hierarchy(s, 3), ConfigError);
    s.levels = {{"range", {0}, {3}}};
    EXPECT_THROW(validate_hierarchy(s, 3), ConfigError);
    s.levels = {{"overlap", {0, 1}, {1}}};
    EXPECT_THROW(validate_hierarchy(s, 3), ConfigError);
    EXPECT_THROW(validate_hierarchy(HierarchySpec{}, 3), ConfigError);
}

TEST(Flow, BinaryRunSkipsDecisionThree) {
    const Dataset d = ts::blobs({60, 60}, 4, 1.5, 2);
    const FlowReport r = run_flow(d, quick_config({"logreg"}));
    EXPECT_EQ(r.route, Route::binary);
    EXPECT_FALSE(r.randomized_baseline.has_value());
    for (const auto& rec : r.trail) EXPECT_NE(rec.stage, "decision3_hierarchy");
    EXPECT_TRUE(r.main.scored);
    ASSERT_TRUE(r.main.test_metrics.auc.has_value());
    EXPECT_GT(*r.main.test_metrics.auc, 0.9);
    EXPECT_EQ(r.trail.back().stage, "final_scoring");
}

TEST(Flow, StageOrder) {
    const Dataset d = ts::blobs({60, 60}, 3, 1.5, 2);
    const FlowReport r = run_flow(d, quick_config({"logreg"}));
    std::vector<std::string> stages;
    for (const auto& rec : r.trail) stages.push_back(rec.stage);
    EXPECT_EQ(stages, (std::vector<std::string>{"split", "decision1_route", "ranking",
                                                "decision2_model", "dimensionality", "final_fit",
                                                "final_scoring"}));
}

TEST(Flow, BalancedThreeClassKeepsFlat) {
    const Dataset d = ts::blobs({80, 80, 80}, 3, 4.0, 5);
    const FlowReport r = run_flow(d, quick_config({"multinomial_logreg"}));
    EXPECT_EQ(r.route, Route::multiclass_flat);
    ASSERT_TRUE(r.main.cv_metrics.has_value());
    EXPECT_GT(r.main.cv_metrics->macro.recall, 0.9);
    // oracle: baseline is the majority fraction of the training counts
    const auto& tc = r.main.train_counts;
    const double total = static_cast<double>(std::accumulate(tc.begin(), tc.end(), std::int64_t{0}));
    EXPECT_DOUBLE_EQ(*r.randomized_baseline,
                     static_cast<double>(*std::max_element(tc.begin(), tc.end())) / total);
    EXPECT_TRUE(r.advisories.empty());
}

TEST(Flow, NoiseLabelsSitNearMajorityAndGetAdvisory) {
    // labels independent of the features
    Dataset d = ts::blobs({150, 60, 40}, 3, 0.0, 8);
    const FlowReport r = run_flow(d, quick_config({"multinomial_logreg"}));
    ASSERT_TRUE(r.main.cv_metrics.has_value());
    EXPECT_LT(r.main.cv_metrics->macro.recall, *r.randomized_baseline);
    EXPECT_NEAR(r.main.cv_metrics->overall_accuracy, *r.randomized_baseline, 0.12);
    EXPECT_NE(std::find(r.advisories.begin(), r.advisories.end(), "hierarchy recommended"),
              r.advisories.end());
    EXPECT_EQ(r.route, Route::multiclass_flat);
}

TEST(Flow, BinaryOnlyFamiliesDroppedOnMulticlass) {
    const Dataset d = ts::blobs({40, 40, 40}, 2, 3.0, 1);
    const FlowReport r = run_flow(d, quick_config({"logreg", "multinomial_logreg"}));
    ASSERT_EQ(r.main.leaderboard.size(), 1u);
    EXPECT_EQ(r.main.leaderboard[0].name, "multinomial_logreg");
    EXPECT_FALSE(r.advisories.empty());
    EXPECT_THROW(run_flow(d, quick_config({"lssvm"})), ConfigError);
}

TEST(Flow, TestSplitCannotInfluenceEarlierStages) {
    const Dataset d = ts::blobs({70, 50, 40}, 4, 1.2, 11);
    const SplitPair split = stratified_split(d, 0.3, 4);
    SplitPair scrambled = split;
    // replace every test row with noise and rotate the labels
    scrambled.test.features.setRandom();
    for (auto& y : scrambled.test.labels) y = (y + 1) % 3;
    const FlowConfig cfg = quick_config({"multinomial_logreg"});
    const FlowReport a = run_flow(split, cfg);
    const FlowReport b = run_flow(scrambled, cfg);
    EXPECT_TRUE(same_trail(trail_before_scoring(a), trail_before_scoring(b)));
    EXPECT_FALSE(same_trail(a.trail, b.trail));
}

TEST(Flow, HierarchyLevelsRunWhenFlatFallsShort) {
    // class 2 overlaps class 1 entirely, so the flat model cannot recall it
    Dataset d = ts::blobs({300, 60, 40}, 3, 3.0, 13);
    for (std::size_t i = 0; i < d.rows(); ++i) {
        if (d.labels[i] == 2) d.features.row(static_cast<Eigen::Index>(i)).array() -= 3.0;
    }
    FlowConfig cfg = quick_config({"multinomial_logreg", "logreg"});
    cfg.hierarchy = HierarchySpec{{{"zero_vs_rest", {0}, {1, 2}}, {"one_vs_two", {1}, {2}}}};
    const FlowReport r = run_flow(d, cfg);
    ASSERT_LT(r.main.cv_metrics->macro.recall, *r.randomized_baseline);
    ASSERT_EQ(r.levels.size(), 2u);
    EXPECT_EQ(r.levels[1].class_names, (std::vector<std::string>{"c2", "c1"}));
    ASSERT_TRUE(r.hierarchy_cv.has_value());
    const double expected = (r.levels[0].cv_metrics->positive.recall +
                             r.levels[1].cv_metrics->positive.recall) / 2;
    EXPECT_DOUBLE_EQ(r.hierarchy_cv->recall, expected);
    EXPECT_EQ(r.route == Route::multiclass_hierarchical,
              r.hierarchy_cv->recall > r.main.cv_metrics->macro.recall);
    EXPECT_TRUE(r.hierarchy_test.has_value());
}

TEST(Flow, StageIsNamedInErrors) {
    const Dataset d = ts::blobs({40, 40, 40}, 2, 3.0, 1);
    FlowConfig cfg = quick_config({"multinomial_logreg"});
    cfg.hierarchy = HierarchySpec{{{"bad", {0}, {7}}}};
    try {
        run_flow(d, cfg);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("config"), std::string::npos);
    }
}

TEST(Flow, SameSeedSameReport) {
    const Dataset d = ts::blobs({50, 30, 30}, 3, 2.0, 3);
    const FlowConfig cfg = quick_config({"multinomial_logreg", "decision_forest"});
    const FlowReport a = run_flow(d, cfg);
    const FlowReport b = run_flow(d, cfg);
    EXPECT_TRUE(same_trail(a.trail, b.trail));
    EXPECT_EQ(serialize_model(a.main.model), serialize_model(b.main.model));
}
