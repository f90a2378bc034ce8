#include <benchmark/benchmark.h>

#include "diffcast/dataset.hpp"
#include "diffcast/diffusion_basis.hpp"
#include "diffcast/eigensolver.hpp"
#include "diffcast/kernel_tuning.hpp"
#include "diffcast/random.hpp"
#include "diffcast/simulators.hpp"

#include <functional>
#include <numbers>

using namespace diffcast;

static Matrix circle_points(Eigen::Index n) {
    Philox4x32 rng(1);
    Matrix x(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * rng.uniform();
        x(i, 0) = std::cos(t);
        x(i, 1) = std::sin(t);
    }
    return x;
}

static void knn_lorenz(benchmark::State& state) {
    const TimeSeries ts = simulate_lorenz63(state.range(0), 0.1, std::uint64_t{1});
    for (auto _ : state) benchmark::DoNotOptimize(knn(ts, 512));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(knn_lorenz)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void tune_kde_circle(benchmark::State& state) {
    const NeighborList nn = knn(circle_points(state.range(0)), 512);
    const BandwidthProfile profile = adhoc_bandwidth(nn, 8);
    for (auto _ : state) {
        const KernelSum sum(kde_exponents(nn, profile), nn.size());
        benchmark::DoNotOptimize(tune(std::cref(sum), default_grid()));
    }
}
BENCHMARK(tune_kde_circle)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

static SparseMatrix circle_generator(Eigen::Index n) {
    BasisOptions options;
    options.M = 2;
    const TimeSeries ts(circle_points(n), 1.0);
    const LearnedBasis learned = learn_basis(ts, options);
    const SparseMatrix kernel =
        build_vb_kernel(ts, learned.density, learned.basis.eps, learned.basis.beta, learned.neighbor_cap);
    return symmetric_generator(kernel, learned.ledger, learned.basis.alpha);
}

static void eigensolve(benchmark::State& state, EigenSolverKind kind) {
    const SparseMatrix l = circle_generator(state.range(0));
    EigenOptions options;
    options.kind = kind;
    for (auto _ : state) benchmark::DoNotOptimize(largest_eigenpairs(l, state.range(1), options));
}
BENCHMARK_CAPTURE(eigensolve, dense, EigenSolverKind::Dense)->Args({2000, 30})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(eigensolve, lanczos, EigenSolverKind::Lanczos)
    ->Args({2000, 30})
    ->Args({8000, 30})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
