#include <benchmark/benchmark.h>

#include <random>

#include "pkm/dataset.hpp"
#include "pkm/encoding.hpp"
#include "pkm/model.hpp"

namespace {

// Three Gaussian classes in 8 dimensions with overlapping tails.
pkm::Dataset synthetic(std::size_t m, std::uint64_t seed) {
    constexpr std::size_t d = 8;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<pkm::Feature> features;
    for (std::size_t n = 0; n < d; ++n) features.push_back({"x" + std::to_string(n), pkm::FeatureKind::Numeric});
    pkm::Schema schema(features, "class", {"a", "b", "c"});
    std::vector<pkm::Column> columns(d, pkm::NumericColumn(m));
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) {
        labels[i] = static_cast<int>(i % 3);
        for (std::size_t n = 0; n < d; ++n) {
            std::get<pkm::NumericColumn>(columns[n])[i] = noise(rng) + (n % 3 == i % 3 ? 2.0 : 0.0);
        }
    }
    return pkm::Dataset(schema, std::move(columns), std::move(labels));
}

void BM_fit(benchmark::State& state, pkm::Variant variant) {
    const auto data = synthetic(static_cast<std::size_t>(state.range(0)), 42);
    pkm::FitConfig config;
    config.variant = variant;
    for (auto _ : state) {
        auto fitted = pkm::fit_predictive_kmeans(data, config);
        benchmark::DoNotOptimize(fitted.model.inertia);
    }
    state.SetComplexityN(state.range(0));
}

void BM_build_codebook(benchmark::State& state) {
    const auto data = synthetic(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(pkm::build_codebook(data));
    state.SetComplexityN(state.range(0));
}

void doubling_sizes(benchmark::internal::Benchmark* b) {
    for (long m : {1000, 2000, 4000, 8000}) b->Arg(m);
}

}  // namespace

BENCHMARK_CAPTURE(BM_fit, pkm_snb, pkm::Variant::PkmSnb)
    ->Apply(doubling_sizes)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK_CAPTURE(BM_fit, pkm_mv, pkm::Variant::PkmMv)
    ->Apply(doubling_sizes)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK_CAPTURE(BM_fit, km_mv, pkm::Variant::KmMv)
    ->Apply(doubling_sizes)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_build_codebook)->Apply(doubling_sizes)->Unit(benchmark::kMillisecond)->Complexity();

BENCHMARK_MAIN();
