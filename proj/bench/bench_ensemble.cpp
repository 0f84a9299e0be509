// Serial reference against the OpenMP paths.
//
//   qotto_bench --benchmark_filter=Ensemble
//
// Ensemble/serial and Ensemble/omp run the same trajectories and must give the
// same records; the omp case is only faster with more than one core.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "qotto/engine.hpp"
#include "qotto/kernel.hpp"
#include "qotto/model.hpp"
#include "qotto/traj.hpp"

using namespace qotto;

namespace {

CycleConfig bench_config() {
    CycleConfig c;
    c.dims = {12, 12};
    c.params.nbar_th = 1.0;
    c.t1 = c.t3 = 10.0;
    c.t2 = 100.0;
    c.t4 = 200.0;
    c.meas = {Scheme::dispersive, 0.02};
    c.n_traj = 64;
    c.stepper.dt = 1e-2;
    return c;
}

void Ensemble(benchmark::State& state) {
    const CyclePlan plan(bench_config());
    EnsembleOptions o;
    o.serial = state.range(0) == 0;
    o.workers = o.serial ? 1 : omp_get_max_threads();
    for (auto _ : state) {
        const EnsembleRun run = run_ensemble(plan, o);
        benchmark::DoNotOptimize(run.records.back().work);
    }
    state.SetLabel(o.serial ? "serial" : "omp x" + std::to_string(o.workers));
    state.SetItemsProcessed(state.iterations() * plan.config().n_traj);
}
BENCHMARK(Ensemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

// one unitary step: dense reference against the stencil kernel
void StepDense(benchmark::State& state) {
    const SpaceDims d{int(state.range(0)), int(state.range(0))};
    const ModelParams p;
    const QOperator h = hamiltonian(p, -1.0, d);
    QState psi = QState::fock(d, 0, 4);
    for (auto _ : state) {
        psi = hamiltonian_step(psi, h, 5e-3);
        benchmark::DoNotOptimize(psi.vector().data());
    }
}
BENCHMARK(StepDense)->Arg(12)->Arg(20);

void StepStencil(benchmark::State& state) {
    const SpaceDims d{int(state.range(0)), int(state.range(0))};
    const ModelParams p;
    const FockKernel k(d, p.omega_m, p.G);
    KernelWorkspace ws(d.size());
    CVector psi = QState::fock(d, 0, 4).vector();
    for (auto _ : state) {
        k.propagate(-1.0, 5e-3, psi, ws);
        k.renormalize(psi);
        benchmark::DoNotOptimize(psi.data());
    }
}
BENCHMARK(StepStencil)->Arg(12)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
