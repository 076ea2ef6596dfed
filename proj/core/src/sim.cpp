/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "socest/sim.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace socest {

namespace {

// Pulse ladder shaped after the 360 s dynamic stress test: (duration, current
// as a fraction of peak, discharge positive).
constexpr std::array<std::pair<double, double>, 20> kDstLadder{{
    {16, 0.0},   {28, 0.125}, {12, 0.25},  {8, -0.125},  {16, 0.0},
    {24, 0.125}, {12, 0.25},  {8, -0.125}, {16, 0.0},    {24, 0.125},
    {12, 0.25},  {8, -0.125}, {16, 0.0},   {36, 0.125},  {8, 1.0},
    {24, 0.625}, {8, -0.25},  {32, 0.25},  {8, -0.5},    {44, 0.0},
}};
constexpr double kDstLadderLength = 360.0;

// Square-wave components of the urban-like profile: (amplitude fraction, period [s]).
// The periods are pairwise incommensurate so the pattern never locks.
constexpr double kFudsOffset = 0.25;
const std::array<std::pair<double, double>, 3> kFudsWaves{{
    {0.35, 11.0},
    {0.25, 10.0 * std::numbers::sqrt3},
    {0.15, 12.0 * std::numbers::pi},
}};

double dst_value(double t, double period)
{
    double phase = std::fmod(t, period) / period * kDstLadderLength;
    for (const auto& [duration, level] : kDstLadder) {
        if (phase < duration) {
            return level;
        }
        phase -= duration;
    }
    return kDstLadder.back().second;
}

double square(double t, double period)
{
    return std::sin(2.0 * std::numbers::pi * t / period) >= 0.0 ? 1.0 : -1.0;
}

double fuds_value(double t)
{
    double v = kFudsOffset;
    for (const auto& [amp, period] : kFudsWaves) {
        v += amp * square(t, period);
    }
    return v;
}

}  // namespace

void DriveCycleSpec::validate() const
{
    if (!(duration_s > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "cycle duration must be positive");
    }
    if (!(peak_a >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "cycle peak current must be non-negative");
    }
    if (kind == CycleKind::DstLike && !(repeat_period_s > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "cycle repeat period must be positive");
    }
    if (kind == CycleKind::Custom) {
        if (segments.empty()) {
            throw Error(ErrorKind::InvalidArgument, "custom cycle needs at least one segment");
        }
        for (const auto& seg : segments) {
            if (!(seg.duration_s > 0.0) || !std::isfinite(seg.current_a)) {
                throw Error(ErrorKind::InvalidArgument,
                            "custom segments need positive duration and finite current");
            }
        }
    }
}

std::vector<double> generate_cycle(const DriveCycleSpec& spec, double dt_s)
{
    spec.validate();
    if (!(dt_s > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "sample interval must be positive");
    }
    std::size_t steps = static_cast<std::size_t>(std::llround(spec.duration_s / dt_s));
    if (spec.kind == CycleKind::Custom) {
        double total = 0.0;
        for (const auto& seg : spec.segments) {
            total += seg.duration_s;
        }
        steps = static_cast<std::size_t>(std::llround(total / dt_s));
    }

    std::vector<double> out(steps, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * dt_s;
        switch (spec.kind) {
        case CycleKind::ConstantCurrent:
            out[k] = spec.peak_a;
            break;
        case CycleKind::DstLike:
            out[k] = spec.peak_a * dst_value(t_mid, spec.repeat_period_s);
            break;
        case CycleKind::FudsLike:
            out[k] = spec.peak_a * fuds_value(t_mid);
            break;
        case CycleKind::Custom: {
            double edge = 0.0;
            out[k] = spec.segments.back().current_a;
            for (const auto& seg : spec.segments) {
                edge += seg.duration_s;
                if (t_mid < edge) {
                    out[k] = seg.current_a;
                    break;
                }
            }
            break;
        }
        }
    }
    return out;
}

void NoiseSpec::validate() const
{
    if (!(v_sigma >= 0.0) || !(i_sigma >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "noise standard deviations must be non-negative");
    }
}

TruthTrace simulate_truth(const BatterySpec& spec, const TheveninParams& params,
                          const OcvCurve& curve, const std::vector<double>& cycle,
                          double soc_init)
{
    spec.validate();
    params.validate();
    if (!(soc_init >= 0.0 && soc_init <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "initial SOC must lie in [0, 1]");
    }

    TruthTrace trace;
    trace.params = params;
    trace.curve = curve;
    trace.soc_init = soc_init;
    trace.time_s.reserve(cycle.size());
    trace.current_a.reserve(cycle.size());
    trace.soc.reserve(cycle.size());
    trace.up_v.reserve(cycle.size());
    trace.ut_v.reserve(cycle.size());

    EcmState state{soc_init, 0.0, false};
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const double current = cycle[k];
        state = thevenin_step(state, params, current, spec);
        const double ut = terminal_voltage(state, params, current, curve);
        trace.time_s.push_back(static_cast<double>(k + 1) * spec.dt_s);
        trace.current_a.push_back(current);
        trace.soc.push_back(state.soc);
        trace.up_v.push_back(state.up_v);
        trace.ut_v.push_back(ut);
        if (ut < spec.v_min || ut > spec.v_max) {
            trace.cutoff = true;
            trace.cutoff_index = k;
            break;
        }
    }
    trace.soc_clamped = state.soc_clamped;
    return trace;
}

MeasuredTrace corrupt(const TruthTrace& truth, const NoiseSpec& noise)
{
    noise.validate();
    std::seed_seq v_seq{static_cast<std::uint32_t>(noise.seed),
                        static_cast<std::uint32_t>(noise.seed >> 32), 0x56u};
    std::seed_seq i_seq{static_cast<std::uint32_t>(noise.seed),
                        static_cast<std::uint32_t>(noise.seed >> 32), 0x49u};
    std::mt19937_64 v_rng(v_seq);
    std::mt19937_64 i_rng(i_seq);
    std::normal_distribution<double> v_noise(0.0, 1.0);
    std::normal_distribution<double> i_noise(0.0, 1.0);

    MeasuredTrace out;
    out.time_s = truth.time_s;
    out.current_a = truth.current_a;
    out.voltage_v = truth.ut_v;
    out.soc_ref = truth.soc;
    if (noise.v_sigma > 0.0) {
        for (double& v : out.voltage_v) {
            v += noise.v_sigma * v_noise(v_rng);
        }
    }
    if (noise.i_sigma > 0.0) {
        for (double& i : out.current_a) {
            i += noise.i_sigma * i_noise(i_rng);
        }
    }
    return out;
}

}  // namespace socest
