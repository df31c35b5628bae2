#include <benchmark/benchmark.h>

#include "diffnet/admm.hpp"
#include "diffnet/lossgrad.hpp"
#include "diffnet/simgen.hpp"
#include "diffnet/solver.hpp"

namespace {

using namespace diffnet;

struct Data {
    Matrix x;
    Matrix y;
};

Data simulated(Eigen::Index p, Eigen::Index n) {
    const SimDesign design = build_design(SimCase::sparse, p);
    return {center_columns(sample_gaussian(design.sigma1, n, 1)),
            center_columns(sample_gaussian(design.sigma2, n, 2))};
}

void BM_Gradient(benchmark::State& state, GradientMode mode) {
    const auto p = state.range(0);
    const auto n = state.range(1);
    const Data d = simulated(p, n);
    const auto engine = GradientEngine::from_centered_data(LossKind::symmetric, d.x, d.y, mode);
    const Matrix delta = Matrix::Constant(p, p, 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(engine.gradient(delta));
}
BENCHMARK_CAPTURE(BM_Gradient, dense, GradientMode::dense)
    ->Args({100, 50})->Args({400, 100})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gradient, lowrank, GradientMode::low_rank)
    ->Args({100, 50})->Args({400, 100})->Unit(benchmark::kMillisecond);

void BM_FistaPath(benchmark::State& state) {
    const Data d = simulated(state.range(0), 100);
    for (auto _ : state) {
        const auto engine = GradientEngine::from_centered_data(LossKind::asymmetric, d.x, d.y,
                                                               GradientMode::dense);
        benchmark::DoNotOptimize(
            solve_path(engine, lambda_grid(engine.lambda_max()), SolverConfig{}));
    }
}
BENCHMARK(BM_FistaPath)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AdmmPath(benchmark::State& state) {
    const Data d = simulated(state.range(0), 100);
    for (auto _ : state) {
        const AdmmSolver admm(sample_covariance(d.x, false), sample_covariance(d.y, false));
        benchmark::DoNotOptimize(
            admm.solve_path(lambda_grid(admm.engine().lambda_max()), AdmmConfig{}));
    }
}
BENCHMARK(BM_AdmmPath)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
