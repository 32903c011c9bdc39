#include <benchmark/benchmark.h>

#include <random>

#include "fjlt/estimators.hpp"
#include "fjlt/hadamard.hpp"
#include "fjlt/timing.hpp"
#include "fjlt/transform.hpp"

namespace {

fjlt::RealVector random_input(std::size_t n) {
    std::mt19937_64 rng(n);
    std::normal_distribution<double> g;
    fjlt::RealVector x(n);
    for (auto& e : x) e = g(rng);
    return x;
}

void BM_Fwht(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_input(n);
    auto work = x;
    for (auto _ : state) {
        std::copy(x.begin(), x.end(), work.begin());
        fjlt::fwht_in_place(work);
        benchmark::DoNotOptimize(work.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Fwht)->RangeMultiplier(2)->Range(1 << 10, 1 << 20);

void BM_Apply(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto t = fjlt::sample_transform(n, n / 4, 1);
    const auto x = random_input(n);
    for (auto _ : state) benchmark::DoNotOptimize(t.apply(x));
}
BENCHMARK(BM_Apply)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_DenseBaseline(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto t = fjlt::sample_transform(n, n / 4, 1);
    const auto x = random_input(n);
    for (auto _ : state) benchmark::DoNotOptimize(fjlt::dense_reference_apply(t, x));
}
BENCHMARK(BM_DenseBaseline)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond);

void BM_RowGram(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto rows = fjlt::sample_transform(n, n / 8, 2).rows();
    for (auto _ : state) {
        fjlt::RowGram g(rows, rows.k());
        benchmark::DoNotOptimize(g.correlation().data());
    }
}
BENCHMARK(BM_RowGram)->RangeMultiplier(4)->Range(1 << 8, 1 << 16);

}  // namespace
BENCHMARK_MAIN();
