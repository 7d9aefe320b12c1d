#include <benchmark/benchmark.h>

#include "polaron/scenario.hpp"

using namespace polaron;

namespace {

const EvolutionModel& model() {
    static const EvolutionModel m = [] {
        ScenarioConfig cfg;
        BathParams ref;
        const double scale = calibrate_scale(ref, 0.07);
        return assemble_model(cfg.chain, scaled_bath(cfg, scale), cfg);
    }();
    return m;
}

void BM_HeisenbergReversed(benchmark::State& state) {
    const EvolutionModel& m = model();
    double tau = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(heisenberg_reversed(m.x.x_a, m.es, tau));
        tau += 1e-3;
    }
}
BENCHMARK(BM_HeisenbergReversed);

void BM_PhiEvaluation(benchmark::State& state) {
    BathParams b = model().bath;
    b.n_quad = static_cast<int>(state.range(0));
    const PhononBath pb(b);
    double tau = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pb.phi(tau));
        tau += 1e-3;
    }
}
BENCHMARK(BM_PhiEvaluation)->Arg(512)->Arg(2048);

void BM_CorrelationTable(benchmark::State& state) {
    const EvolutionModel& m = model();
    for (auto _ : state) {
        benchmark::DoNotOptimize(correlation_table(m.bath, 1e-3, 1.0));
    }
}
BENCHMARK(BM_CorrelationTable)->Unit(benchmark::kMillisecond);

void BM_AccumulatorStep(benchmark::State& state) {
    const EvolutionModel& m = model();
    const double dt = 1e-3;
    const CorrelationTable table = correlation_table(m.bath, dt, 2.0);
    KernelAccumulators acc = KernelAccumulators::zero(m.space.dim());
    for (auto _ : state) {
        if (2 * acc.step + 2 >= table.values.size()) {
            acc = KernelAccumulators::zero(m.space.dim());
        }
        acc = accumulators_advance(acc, table, m.es, m.x.x_a, m.x.x_b, dt);
    }
}
BENCHMARK(BM_AccumulatorStep);

void BM_Trajectory(benchmark::State& state) {
    const EvolutionModel& m = model();
    EvolutionConfig ev;
    ev.variant = static_cast<Variant>(state.range(0));
    ev.t_max = 0.5;
    ev.lindblad_rate = 1.0;
    ev.health.abort = false;
    ev = resolve_config(ev, m, 9.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trajectory(ev, m));
    }
    state.SetLabel(std::string(to_string(ev.variant)));
}
BENCHMARK(BM_Trajectory)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
