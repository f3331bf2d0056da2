#include <benchmark/benchmark.h>

#include <random>

#include "skidncs/norm_bounded_embedding.hpp"
#include "skidncs/simulator.hpp"

using namespace skidncs;

namespace {

LiftedSystem make_system() {
    return LiftedSystem{
        build_linear_model(TrajectorySegment{Pose{}, 1.0}, RobotGeometry{0.1, 0.5}),
        DelayBounds(0.02, 0.06, 0.1)};
}

Scenario make_scenario(int horizon, int substeps) {
    return Scenario{RobotGeometry{0.1, 0.5},
                    TrajectorySegment{Pose{}, 1.0},
                    DelayBounds(0.02, 0.06, 0.1),
                    TrackingError{0.05, -0.05, 0.1},
                    0.2,
                    horizon,
                    42,
                    SinusoidSlip{0.1, 2.0},
                    UniformRandomDelay{},
                    OpenLoop{},
                    substeps};
}

void BM_LiftedMatrices(benchmark::State& state) {
    const LiftedSystem sys = make_system();
    double h = 0.04;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lifted_matrices(sys, h));
        h = h == 0.04 ? 0.08 : 0.04;
    }
}
BENCHMARK(BM_LiftedMatrices);

void BM_LiftedStep(benchmark::State& state) {
    const LiftedSystem sys = make_system();
    LiftedState xi{TrackingError{0.05, -0.05, 0.1}, Vec2{0.0, 0.0}};
    for (auto _ : state) {
        xi = lifted_step(sys, xi, Vec2{0.01, -0.01}, SlipDeviation{0.05, -0.05}, 0.06);
        benchmark::DoNotOptimize(xi);
    }
}
BENCHMARK(BM_LiftedStep);

void BM_ThinSvd(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Mat a(5, 7);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 7; ++c) a(r, c) = val(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(thin_svd(a, 1e-12));
    }
}
BENCHMARK(BM_ThinSvd);

void BM_BuildEmbedding(benchmark::State& state) {
    const LiftedSystem sys = make_system();
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_embedding(sys));
    }
}
BENCHMARK(BM_BuildEmbedding);

void BM_CertifyEmbedding(benchmark::State& state) {
    const LiftedSystem sys = make_system();
    const NormBoundedModel nb = build_embedding(sys);
    for (auto _ : state) {
        benchmark::DoNotOptimize(certify_embedding(nb, sys, state.range(0)));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CertifyEmbedding)->Range(8, 1024)->Complexity(benchmark::oN);

void BM_IntegratePosePeriod(benchmark::State& state) {
    const RobotGeometry geom{0.1, 0.5};
    const SlipSignal slip = [](double) { return SlipState{1.05, 0.95}; };
    const Pose q0{0.0, 0.0, 0.1};
    const auto substeps = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_pose(
            q0, ControlSchedule::constant(ControlInput{1.0, 0.1}), slip, geom, 0.1,
            0.1 / substeps));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IntegratePosePeriod)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_RunScenario(benchmark::State& state) {
    const Scenario sc = make_scenario(static_cast<int>(state.range(0)), 200);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(sc));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RunScenario)->Range(8, 128)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
