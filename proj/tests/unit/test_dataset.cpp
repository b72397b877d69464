#include "genflow/dataset.hpp"
#include "genflow/error.hpp"
#include "../support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace genflow;
namespace ts = testing_support;

TEST(Loader, ReindexesNumericLabelsAscending) {
    const auto dir = ts::scratch_dir("loader_reindex");
    const auto path = ts::write_file(dir / "t.csv", "a,b,label\n1,2,5\n3,4,9\n5,6,5\n");
    const Dataset d = load_dataset(path, {.label_column = "label"});
    EXPECT_EQ(d.labels, (std::vector<int>{0, 1, 0}));
    EXPECT_EQ(d.num_classes(), 2);
    EXPECT_EQ(d.class_names, (std::vector<std::string>{"5", "9"}));
    EXPECT_EQ(d.cols(), 2u);
}

TEST(Loader, NumericOrderNotLexicographic) {
    const auto dir = ts::scratch_dir("loader_numeric");
    const auto path = ts::write_file(dir / "t.csv", "x,y\n1,10\n2,9\n3,10\n");
    const Dataset d = load_dataset(path, {.label_column = "y"});
    EXPECT_EQ(d.class_names, (std::vector<std::string>{"9", "10"}));
    EXPECT_EQ(d.labels, (std::vector<int>{1, 0, 1}));
}

TEST(Loader, LabelByIndexAndQuotedFields) {
    const auto dir = ts::scratch_dir("loader_index");
    const auto path =
        ts::write_file(dir / "t.csv", "\"kind\",\"w, h\",z\n\"b\",1.5,2\n\"a\",2.5,3\n");
    const Dataset d = load_dataset(path, {.label_column = "0"});
    EXPECT_EQ(d.feature_names, (std::vector<std::string>{"w, h", "z"}));
    EXPECT_EQ(d.labels, (std::vector<int>{1, 0}));
    EXPECT_DOUBLE_EQ(d.features(1, 0), 2.5);
}

TEST(Loader, TabDelimiter) {
    const auto dir = ts::scratch_dir("loader_tab");
    const auto path = ts::write_file(dir / "t.tsv", "a\tc\n1\tx\n2\ty\n");
    const Dataset d = load_dataset(path, {.label_column = "c", .delimiter = '\t'});
    EXPECT_EQ(d.rows(), 2u);
}

TEST(Loader, MissingCellFailsOrDrops) {
    const auto dir = ts::scratch_dir("loader_na");
    const auto path = ts::write_file(dir / "t.csv", "a,b,c\n1,?,0\n2,3,1\n4,5,0\n6,,1\n");
    EXPECT_THROW(load_dataset(path, {.label_column = "c"}), DataError);
    LoadSummary summary;
    const Dataset d =
        load_dataset(path, {.label_column = "c", .na_policy = NaPolicy::drop_row}, &summary);
    EXPECT_EQ(d.rows(), 2u);
    EXPECT_EQ(summary.dropped_rows, 2u);
}

TEST(Loader, Errors) {
    const auto dir = ts::scratch_dir("loader_err");
    EXPECT_THROW(load_dataset(dir / "absent.csv", {.label_column = "c"}), DataError);
    const auto one = ts::write_file(dir / "one.csv", "a,c\n1,0\n2,0\n");
    EXPECT_THROW(load_dataset(one, {.label_column = "c"}), DataError);
    const auto bad = ts::write_file(dir / "bad.csv", "a,c\n1,0\nfoo,1\n");
    EXPECT_THROW(load_dataset(bad, {.label_column = "c"}), DataError);
    EXPECT_THROW(load_dataset(bad, {.label_column = "nope"}), DataError);
}

TEST(Loader, Idempotent) {
    const auto path = ts::data_dir() / "wbc.csv";
    const Dataset a = load_dataset(path, {.label_column = "class"});
    const Dataset b = load_dataset(path, {.label_column = "class"});
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_TRUE(a.features == b.features);
}

TEST(Loader, BundledFiles) {
    const Dataset wbc = load_dataset(ts::data_dir() / "wbc.csv", {.label_column = "class"});
    EXPECT_EQ(wbc.rows(), 683u);
    EXPECT_EQ(wbc.cols(), 9u);  // sample id column is not a feature
    EXPECT_EQ(wbc.class_counts(), (std::vector<std::size_t>{444, 239}));

    const Dataset tel = load_dataset(ts::data_dir() / "telescope.csv", {.label_column = "class"});
    EXPECT_EQ(tel.rows(), 19020u);
    EXPECT_EQ(tel.cols(), 10u);
    EXPECT_NEAR(static_cast<double>(tel.class_counts()[0]) / 19020.0, 0.65, 0.005);

    const Dataset credit = load_dataset(ts::data_dir() / "german.csv", {.label_column = "class"});
    EXPECT_EQ(credit.rows(), 1000u);
    EXPECT_EQ(credit.cols(), 20u);
}

TEST(Split, TrainCountRounding) {
    EXPECT_EQ(stratified_train_count(444, 0.3), 133u);
    EXPECT_EQ(stratified_train_count(239, 0.3), 72u);
    EXPECT_EQ(stratified_train_count(10, 0.5), 5u);
    EXPECT_EQ(stratified_train_count(5, 0.3), 2u);  // 1.5 rounds up
    EXPECT_EQ(stratified_train_count(2, 0.01), 1u);
    EXPECT_EQ(stratified_train_count(2, 0.99), 1u);
}

TEST(Split, WbcCounts) {
    const Dataset wbc = load_dataset(ts::data_dir() / "wbc.csv", {.label_column = "class"});
    const SplitPair s = stratified_split(wbc, 0.30, 11);
    EXPECT_EQ(s.train.rows(), 205u);
    EXPECT_EQ(s.test.rows(), 478u);
    EXPECT_EQ(s.train.class_counts(), (std::vector<std::size_t>{133, 72}));
}

TEST(Split, PartitionStratificationDeterminism) {
    for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
        const Dataset d = ts::blobs({37, 11, 52}, 3, 1.0, seed);
        const SplitPair a = stratified_split(d, 0.3, seed);
        const SplitPair b = stratified_split(d, 0.3, seed);
        EXPECT_EQ(a.train_rows, b.train_rows);
        std::vector<std::size_t> all = a.train_rows;
        all.insert(all.end(), a.test_rows.begin(), a.test_rows.end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expect(d.rows());
        std::iota(expect.begin(), expect.end(), std::size_t{0});
        EXPECT_EQ(all, expect);
        const auto counts = a.train.class_counts();
        const auto totals = d.class_counts();
        for (std::size_t c = 0; c < counts.size(); ++c) {
            EXPECT_LE(std::abs(static_cast<double>(counts[c]) - 0.3 * static_cast<double>(totals[c])),
                      0.5);
        }
    }
}

TEST(Split, Errors) {
    const Dataset tiny = ts::blobs({1, 5}, 1, 1.0, 1);
    EXPECT_THROW(stratified_split(tiny, 0.3, 1), DataError);
    const Dataset ok = ts::blobs({10, 10}, 1, 1.0, 1);
    const SplitPair half = stratified_split(ok, 0.5, 1);
    EXPECT_EQ(half.train.class_counts(), (std::vector<std::size_t>{5, 5}));
}

TEST(Split, WarnsWhenTrainNotLargerThanWidth) {
    const Dataset wide = ts::blobs({5, 5}, 8, 1.0, 3);
    const SplitPair s = stratified_split(wide, 0.3, 1);
    EXPECT_FALSE(s.warnings.empty());
}

TEST(SignLabels, EncodeDecode) {
    Dataset d = ts::blobs({2, 1}, 1, 1.0, 1);
    d.labels = {0, 1, 0};
    const auto signs = encode_sign_labels(d);
    EXPECT_EQ(signs, (std::vector<int>{-1, 1, -1}));
    EXPECT_EQ(decode_sign_labels(signs), d.labels);
    Dataset zeros = d;
    zeros.labels = {0, 0, 0};
    EXPECT_EQ(encode_sign_labels(zeros), (std::vector<int>{-1, -1, -1}));
    const Dataset three = ts::blobs({2, 2, 2}, 1, 1.0, 1);
    EXPECT_THROW(encode_sign_labels(three), DataError);
}

TEST(Binarize, KeepsOnlyListedClasses) {
    const Dataset d = ts::blobs({3, 4, 5, 6}, 2, 1.0, 2);
    const std::vector<int> pos{1, 2}, neg{3};
    const Dataset b = binarize(d, pos, neg, "p", "n");
    EXPECT_EQ(b.rows(), 15u);
    EXPECT_EQ(b.class_counts(), (std::vector<std::size_t>{6, 9}));
    const std::vector<int> overlap{3};
    EXPECT_THROW(binarize(d, overlap, neg, "p", "n"), DataError);
}

TEST(Dataset, ValidationRejectsNonFinite) {
    Matrix x(2, 1);
    x << 1.0, std::nan("");
    EXPECT_THROW(make_dataset(x, {0, 1}, {"a"}, {"x", "y"}), DataError);
    Matrix ok(2, 1);
    ok << 1.0, 2.0;
    EXPECT_THROW(make_dataset(ok, {0, 0}, {"a"}, {"x", "y"}), DataError);
}
