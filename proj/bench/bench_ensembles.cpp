// Serial reference vs OpenMP kernels on Monte Carlo path ensembles.
// Thread count for the OpenMP variants comes from the benchmark argument.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <numbers>

#include "sburgers/mclab.hpp"

using namespace sburgers;

namespace {

mclab::SlopeProblem slope_problem() {
    mclab::SlopeProblem p;
    p.basis = std::make_shared<noise::NoiseBasis>(noise::fourier_family(16, 1.0, 2.0, noise::Torus{}));
    p.u0 = InitialProfile{profile::NegativeLine{1.0, 0.0}};
    p.x0 = 0.5;
    p.grid = TimeGrid(0.0, 0.5, 500);
    p.stride = 50;
    p.seed = 1;
    return p;
}

mclab::CrossingProblem crossing_problem() {
    mclab::CrossingProblem p;
    p.u0 = InitialProfile{profile::NegativeLine{1.0, 0.0}};
    p.fan = {-1.0, -0.5, 0.0, 0.5, 1.0};
    p.grid = TimeGrid(0.0, 4.0, 4000);
    p.seed = 2;
    return p;
}

mclab::FieldProblem field_problem() {
    mclab::FieldProblem p;
    const noise::Torus dom{0.0, 1.0};
    p.initial = GridField::from_profile(InitialProfile{profile::SineWave{1.0, 2.0 * std::numbers::pi, 0.0}}, dom, 256);
    p.basis = std::make_shared<noise::NoiseBasis>(noise::fourier_family(4, 0.3, 2.0, dom));
    p.grid = TimeGrid(0.0, 0.05, 100);
    p.seed = 3;
    return p;
}

constexpr std::size_t kSlopePaths = 512;
constexpr std::size_t kCrossingPaths = 128;
constexpr std::size_t kFieldPaths = 8;

void BM_SlopeSerial(benchmark::State& st) {
    const auto p = slope_problem();
    for (auto _ : st) benchmark::DoNotOptimize(mclab::slope_ensemble_serial(p, 0, kSlopePaths));
    st.SetItemsProcessed(st.iterations() * kSlopePaths);
}

void BM_SlopeOmp(benchmark::State& st) {
    const auto p = slope_problem();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(mclab::slope_ensemble_omp(p, 0, kSlopePaths));
    st.SetItemsProcessed(st.iterations() * kSlopePaths);
}

void BM_CrossingSerial(benchmark::State& st) {
    const auto p = crossing_problem();
    for (auto _ : st) benchmark::DoNotOptimize(mclab::crossing_ensemble_serial(p, 0, kCrossingPaths));
    st.SetItemsProcessed(st.iterations() * kCrossingPaths);
}

void BM_CrossingOmp(benchmark::State& st) {
    const auto p = crossing_problem();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(mclab::crossing_ensemble_omp(p, 0, kCrossingPaths));
    st.SetItemsProcessed(st.iterations() * kCrossingPaths);
}

void BM_FieldSerial(benchmark::State& st) {
    const auto p = field_problem();
    for (auto _ : st) benchmark::DoNotOptimize(mclab::field_ensemble_serial(p, 0, kFieldPaths));
    st.SetItemsProcessed(st.iterations() * kFieldPaths);
}

void BM_FieldOmp(benchmark::State& st) {
    const auto p = field_problem();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(mclab::field_ensemble_omp(p, 0, kFieldPaths));
    st.SetItemsProcessed(st.iterations() * kFieldPaths);
}

// 1, 2, 4, ... up to the core count
void thread_counts(benchmark::internal::Benchmark* b) {
    const int cores = omp_get_num_procs();
    for (int t = 1; t <= cores; t *= 2) b->Arg(t);
    if ((cores & (cores - 1)) != 0) b->Arg(cores);
}

}  // namespace

BENCHMARK(BM_SlopeSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SlopeOmp)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CrossingSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CrossingOmp)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FieldSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FieldOmp)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
