#include "aigiqa/metrics.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

std::pair<std::vector<double>, std::vector<double>> make_series(std::size_t n) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> p(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::round(g(rng) * 20.0) / 20.0;  // benchmark MOS has many ties
        p[i] = y[i] + 0.5 * g(rng);
    }
    return {p, y};
}

void BM_Plcc(benchmark::State & state) {
    const auto [p, y] = make_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(aigiqa::plcc(p, y));
    state.SetComplexityN(state.range(0));
}

void BM_Srcc(benchmark::State & state) {
    const auto [p, y] = make_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(aigiqa::srcc(p, y));
    state.SetComplexityN(state.range(0));
}

void BM_Krcc(benchmark::State & state) {
    const auto [p, y] = make_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(aigiqa::krcc(p, y));
    state.SetComplexityN(state.range(0));
}

void BM_PlccLogistic(benchmark::State & state) {
    const auto [p, y] = make_series(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(aigiqa::plcc_logistic(p, y));
}

} // namespace

BENCHMARK(BM_Plcc)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_Srcc)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_Krcc)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNLogN);
// 2982 is the size of the larger benchmark's full set
BENCHMARK(BM_Krcc)->Arg(2982);
BENCHMARK(BM_PlccLogistic)->Arg(600);
