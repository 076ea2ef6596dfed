/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <benchmark/benchmark.h>

#include "socest/filters.hpp"
#include "socest/ident.hpp"
#include "socest/pipeline.hpp"
#include "socest/sim.hpp"

using namespace socest;

namespace {

void BM_FilterStep(benchmark::State& state)
{
    const auto kind = static_cast<FilterKind>(state.range(0));
    const OcvCurve curve = OcvCurve::reference_nmc();
    const TheveninParams params;
    const BatterySpec spec;
    auto fs = FilterState::initial(Vec2(0.8, 0.0), NoiseConfig{}, HinfConfig{}, AdaptiveConfig{});
    double v = 3.9;
    for (auto _ : state) {
        auto r = filter_step(kind, fs, params, spec, curve, HinfConfig{}, AdaptiveConfig{}, 1.0, v);
        fs = std::move(r.state);
        v = 3.9 + 1e-3 * (fs.x(0) - 0.8);
        benchmark::DoNotOptimize(fs);
    }
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_FilterStep)->DenseRange(0, 3);

void BM_FfrlsStep(benchmark::State& state)
{
    auto s = make_thevenin_ident_state();
    double i_prev = 0.0, ue_prev = 0.0;
    long k = 0;
    for (auto _ : state) {
        const double i = (k++ % 7 < 3) ? 1.5 : -0.5;
        const double ue = 0.05 * i + 0.9 * ue_prev + 0.003 * i_prev;
        auto r = thevenin_ident_step(s, i, i_prev, ue, ue_prev);
        s = std::move(r.state);
        i_prev = i;
        ue_prev = ue;
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_FfrlsStep);

void BM_RunJoint(benchmark::State& state)
{
    DriveCycleSpec cycle;
    cycle.duration_s = static_cast<double>(state.range(0));
    cycle.peak_a = 1.0;
    const auto truth = simulate_truth(BatterySpec{}, TheveninParams{}, OcvCurve::reference_nmc(),
                                      generate_cycle(cycle, 1.0), 0.9);
    const auto samples = corrupt(truth, NoiseSpec{0.005, 0.0, 1});
    const RunConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_joint(cfg, samples, &truth));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(samples.size()));
}
BENCHMARK(BM_RunJoint)->Arg(1000)->Arg(3000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
