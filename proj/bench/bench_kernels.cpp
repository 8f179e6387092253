// Serial reference kernels vs. their OpenMP counterparts.

#include "ccaprobe/kernels.hpp"
#include "ccaprobe/random.hpp"

#include <benchmark/benchmark.h>

using namespace ccaprobe;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

// Shapes of a penultimate-feature batch: s samples x 64 features.
void BM_affine_serial(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), 64, 1), w = random_matrix(64, 64, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::affine(x, w));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_affine_parallel(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), 64, 1), w = random_matrix(64, 64, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::affine(x, w));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_cross_serial(benchmark::State& state) {
    const Matrix a = random_matrix(state.range(0), 64, 3), b = random_matrix(state.range(0), 64, 4);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::cross(a, b));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_cross_parallel(benchmark::State& state) {
    const Matrix a = random_matrix(state.range(0), 64, 3), b = random_matrix(state.range(0), 64, 4);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::cross(a, b));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_softmax_serial(benchmark::State& state) {
    const Matrix y = random_matrix(state.range(0), 8, 5);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::softmax_rows(y));
}

void BM_softmax_parallel(benchmark::State& state) {
    const Matrix y = random_matrix(state.range(0), 8, 5);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::softmax_rows(y));
}

}  // namespace

BENCHMARK(BM_affine_serial)->Arg(2000)->Arg(8000);
BENCHMARK(BM_affine_parallel)->Arg(2000)->Arg(8000);
BENCHMARK(BM_cross_serial)->Arg(2000)->Arg(8000);
BENCHMARK(BM_cross_parallel)->Arg(2000)->Arg(8000);
BENCHMARK(BM_softmax_serial)->Arg(8000);
BENCHMARK(BM_softmax_parallel)->Arg(8000);

BENCHMARK_MAIN();
