#include <random>

#include <benchmark/benchmark.h>

#include "ballflow/curvature.hpp"
#include "ballflow/kernels.hpp"
#include "ballflow/triangulation.hpp"

using namespace ballflow;

namespace {

std::vector<double> radii_for(const Triangulation& t) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.9, 1.1);
    std::vector<double> r(t.num_vertices());
    for (double& x : r) x = u(rng);
    return r;
}

void BM_EvaluateTets(benchmark::State& state, kernels::Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const Triangulation t = generate_cycle_join(n, n);
    const std::vector<double> r = radii_for(t);
    kernels::TetEvaluation ev;
    for (auto _ : state) {
        kernels::evaluate_tets(exec, t, r, ev);
        benchmark::DoNotOptimize(ev.angles.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.num_tetrahedra()));
}

void BM_Curvature(benchmark::State& state, kernels::Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const Triangulation t = generate_cycle_join(n, n);
    const PackingVector r(radii_for(t));
    for (auto _ : state) {
        CurvatureReport rep = extended_curvature(t, r, exec);
        benchmark::DoNotOptimize(rep.s);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.num_tetrahedra()));
}

void BM_Jacobian(benchmark::State& state, kernels::Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const Triangulation t = generate_cycle_join(n, n);
    const std::vector<double> r = radii_for(t);
    for (auto _ : state) {
        Eigen::MatrixXd j = kernels::angle_sum_jacobian(exec, t, r);
        benchmark::DoNotOptimize(j.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.num_tetrahedra()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_EvaluateTets, serial, kernels::Exec::Serial)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_EvaluateTets, omp, kernels::Exec::Parallel)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Curvature, serial, kernels::Exec::Serial)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Curvature, omp, kernels::Exec::Parallel)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Jacobian, serial, kernels::Exec::Serial)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(BM_Jacobian, omp, kernels::Exec::Parallel)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
