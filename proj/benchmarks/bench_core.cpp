#include "genflow/model.hpp"
#include "genflow/objectives.hpp"
#include "genflow/ranking.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace genflow;

namespace {

Dataset noisy_pairs(int n, int d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(n, d);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
        y.push_back(i % 2);
        for (int j = 0; j < d; ++j) x(i, j) = g(gen) + (j < d / 2 ? 0.7 * (i % 2) : 0.0);
    }
    std::vector<std::string> names;
    for (int j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    return make_dataset(std::move(x), std::move(y), names, {"a", "b"});
}

void BM_LsSvmSolve(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const Dataset d = noisy_pairs(n, 10, 1);
    const Matrix k = rbf_kernel(d.features, d.features, 0.1);
    Vector s(n);
    for (int i = 0; i < n; ++i) s[i] = d.labels[static_cast<std::size_t>(i)] ? 1 : -1;
    for (auto _ : state) benchmark::DoNotOptimize(solve_lssvm(k, s, 1e-4));
    state.SetComplexityN(n);
}
BENCHMARK(BM_LsSvmSolve)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BoostedFit(benchmark::State& state) {
    const Dataset d = noisy_pairs(static_cast<int>(state.range(0)), 10, 2);
    ModelSpec spec = ModelSpec::from_name("boosted_tree");
    spec.params = {{"leaves", 20}, {"learning_rate", 0.1}, {"trees", 100}};
    for (auto _ : state) benchmark::DoNotOptimize(fit_model(spec, d));
}
BENCHMARK(BM_BoostedFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ForestFit(benchmark::State& state) {
    const Dataset d = noisy_pairs(static_cast<int>(state.range(0)), 10, 3);
    ModelSpec spec = ModelSpec::from_name("decision_forest");
    spec.params = {{"split_count", 128}, {"depth", 16}, {"ensemble_count", 32}};
    for (auto _ : state) benchmark::DoNotOptimize(fit_model(spec, d));
}
BENCHMARK(BM_ForestFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Rankings(benchmark::State& state) {
    const Dataset d = noisy_pairs(2000, static_cast<int>(state.range(0)), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fisher_score(d));
        benchmark::DoNotOptimize(mutual_information(d));
        benchmark::DoNotOptimize(chi_squared(d));
    }
}
BENCHMARK(BM_Rankings)->Arg(10)->Arg(40);

void BM_Mrmr(benchmark::State& state) {
    const Dataset d = noisy_pairs(1000, static_cast<int>(state.range(0)), 5);
    for (auto _ : state) benchmark::DoNotOptimize(mrmr_rank(d, 10, d.cols()));
}
BENCHMARK(BM_Mrmr)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
