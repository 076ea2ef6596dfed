/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "socest/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace socest {

std::string_view to_string(ReferenceMode mode) noexcept
{
    switch (mode) {
    case ReferenceMode::ProvidedColumn: return "provided";
    case ReferenceMode::CoulombFromTrueInit: return "coulomb";
    case ReferenceMode::SimTruth: return "sim_truth";
    }
    return "?";
}

ReferenceMode parse_reference_mode(std::string_view name)
{
    for (auto mode : {ReferenceMode::ProvidedColumn, ReferenceMode::CoulombFromTrueInit,
                      ReferenceMode::SimTruth}) {
        if (name == to_string(mode)) {
            return mode;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown reference mode '" + std::string(name) + "'");
}

void RunConfig::validate() const
{
    if (kinds.empty()) {
        throw Error(ErrorKind::InvalidArgument, "at least one filter kind is required");
    }
    battery.validate();
    curve.validate();
    initial_params.validate();
    noise.validate();
    hinf.validate();
    adaptive.validate();
    if (!(ident_lambda > 0.0 && ident_lambda <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "identification forgetting factor must lie in (0, 1]");
    }
    if (ident_warmup_steps < 0) {
        throw Error(ErrorKind::InvalidArgument, "identification warmup must be non-negative");
    }
    if (!(ident_cov0 > 0.0) || !(ident_trace_cap > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "identification covariance settings must be positive");
    }
    if (!(soc_init_estimator >= 0.0 && soc_init_estimator <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "estimator initial SOC must lie in [0, 1]");
    }
    if (!(reference_soc_init >= 0.0 && reference_soc_init <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "reference initial SOC must lie in [0, 1]");
    }
}

const FilterRun& RunResult::run(FilterKind kind) const
{
    for (const auto& f : filters) {
        if (f.kind == kind) {
            return f;
        }
    }
    throw Error(ErrorKind::InvalidArgument,
                "filter " + std::string(display_name(kind)) + " was not part of this run");
}

namespace {

void check_lengths(std::span<const double> est, std::span<const double> ref)
{
    if (est.size() != ref.size() || est.empty()) {
        throw Error(ErrorKind::LengthMismatch,
                    "estimate and reference must have the same non-zero length");
    }
}

}  // namespace

double rmse_pct(std::span<const double> est, std::span<const double> ref)
{
    check_lengths(est, ref);
    double sum = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double e = est[i] - ref[i];
        sum += e * e;
    }
    return 100.0 * std::sqrt(sum / static_cast<double>(est.size()));
}

double mae_pct(std::span<const double> est, std::span<const double> ref)
{
    check_lengths(est, ref);
    double sum = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        sum += std::abs(est[i] - ref[i]);
    }
    return 100.0 * sum / static_cast<double>(est.size());
}

std::vector<double> build_reference(const RunConfig& config, const MeasuredTrace& samples,
                                    const TruthTrace* truth)
{
    switch (config.reference_mode) {
    case ReferenceMode::SimTruth:
        if (truth != nullptr) {
            return truth->soc;
        }
        if (samples.soc_ref) {
            return *samples.soc_ref;
        }
        throw Error(ErrorKind::MissingReferenceSource,
                    "sim_truth reference needs a simulated trace (soc_ref column)");
    case ReferenceMode::ProvidedColumn:
        if (!samples.soc_ref) {
            throw Error(ErrorKind::MissingReferenceSource,
                        "provided reference needs a soc_ref column in the input");
        }
        return *samples.soc_ref;
    case ReferenceMode::CoulombFromTrueInit: {
        const std::vector<double>& current =
            truth != nullptr ? truth->current_a : samples.current_a;
        std::vector<double> ref;
        ref.reserve(current.size());
        double soc = config.reference_soc_init;
        for (double i : current) {
            soc = coulomb_step(soc, i, config.battery).soc;
            ref.push_back(soc);
        }
        return ref;
    }
    }
    throw Error(ErrorKind::MissingReferenceSource, "unknown reference mode");
}

namespace {

FilterRun run_one(FilterKind kind, const RunConfig& config, const MeasuredTrace& samples)
{
    const std::size_t n = samples.size();
    FilterRun run;
    run.kind = kind;
    for (auto* v : {&run.soc_est, &run.up_est, &run.residual_v, &run.r0, &run.rp, &run.cp,
                    &run.rx, &run.qx_trace, &run.hph}) {
        v->reserve(n);
    }

    FilterState fs = FilterState::initial(Vec2(config.soc_init_estimator, config.up_init_estimator),
                                          config.noise, config.hinf, config.adaptive);
    FfrlsState ident = make_thevenin_ident_state(config.ident_lambda, config.ident_cov0,
                                                 config.ident_theta0, config.ident_trace_cap);
    TheveninParams last_good = config.initial_params;
    double ue_prev = 0.0;
    double soc_prev = config.soc_init_estimator;

    for (std::size_t k = 0; k < n; ++k) {
        const double current = samples.current_a[k];
        const double voltage = samples.voltage_v[k];
        const double ue = config.curve.eval(soc_prev) - voltage;

        if (k > 0) {
            try {
                auto res = thevenin_ident_step(ident, current, samples.current_a[k - 1], ue,
                                               ue_prev);
                ident = std::move(res.state);
                const Inversion inv = invert_coeffs(res.coeffs, config.battery.dt_s);
                if (inv.ok) {
                    last_good = inv.params;
                } else {
                    ++run.nonphysical_params;
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Degenerate) {
                    throw;
                }
                ++run.nonphysical_params;
            }
        }
        ue_prev = ue;

        const bool warming_up = static_cast<long>(k) < config.ident_warmup_steps;
        const TheveninParams& params = warming_up ? config.initial_params : last_good;

        FilterStepResult step = filter_step(kind, fs, params, config.battery, config.curve,
                                            config.hinf, config.adaptive, current, voltage);
        fs = std::move(step.state);
        soc_prev = step.soc;

        run.soc_est.push_back(step.soc);
        run.up_est.push_back(fs.x[1]);
        run.residual_v.push_back(step.diag.residual_v);
        run.r0.push_back(params.r0_ohm);
        run.rp.push_back(params.rp_ohm);
        run.cp.push_back(params.cp_f);
        run.rx.push_back(step.diag.rx);
        run.qx_trace.push_back(step.diag.qx_trace);
        run.hph.push_back(step.diag.hph);
    }

    run.negative_rx = fs.negative_rx_count;
    run.update_failures = fs.update_failures;
    run.soc_clamped = fs.soc_clamped;
    run.ident_windup_steps = ident.windup_steps;
    return run;
}

}  // namespace

RunResult run_joint(const RunConfig& config, const MeasuredTrace& samples, const TruthTrace* truth)
{
    config.validate();
    if (samples.size() == 0) {
        throw Error(ErrorKind::EmptyInput, "no samples to process");
    }
    if (samples.current_a.size() != samples.size() || samples.voltage_v.size() != samples.size()) {
        throw Error(ErrorKind::LengthMismatch, "sample columns differ in length");
    }

    RunResult result;
    result.time_s = samples.time_s;
    result.reference = build_reference(config, samples, truth);
    if (result.reference.size() != samples.size()) {
        throw Error(ErrorKind::LengthMismatch, "reference length differs from sample count");
    }
    for (double v : samples.voltage_v) {
        if (v < config.battery.v_min || v > config.battery.v_max) {
            ++result.cutoff_events;
        }
    }

    for (FilterKind kind : config.kinds) {
        FilterRun run = run_one(kind, config, samples);
        run.rmse_pct = rmse_pct(run.soc_est, result.reference);
        run.mae_pct = mae_pct(run.soc_est, result.reference);
        result.filters.push_back(std::move(run));
    }
    return result;
}

}  // namespace socest
