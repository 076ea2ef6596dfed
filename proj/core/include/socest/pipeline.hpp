/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "socest/filters.hpp"
#include "socest/ident.hpp"
#include "socest/model.hpp"
#include "socest/sim.hpp"

namespace socest {

enum class ReferenceMode { ProvidedColumn, CoulombFromTrueInit, SimTruth };

std::string_view to_string(ReferenceMode mode) noexcept;
ReferenceMode parse_reference_mode(std::string_view name);

struct RunConfig {
    std::vector<FilterKind> kinds{std::begin(kAllFilterKinds), std::end(kAllFilterKinds)};
    BatterySpec battery;
    OcvCurve curve = OcvCurve::reference_nmc();
    TheveninParams initial_params;
    NoiseConfig noise;
    HinfConfig hinf;
    AdaptiveConfig adaptive;

    double ident_lambda = 0.999;
    long ident_warmup_steps = 100;
    double ident_cov0 = 1e6;
    DiscreteCoeffs ident_theta0{1e-3, 1e-3, 0.5};
    double ident_trace_cap = 1e9;

    double soc_init_estimator = 0.8;
    double up_init_estimator = 0.0;

    ReferenceMode reference_mode = ReferenceMode::SimTruth;
    /// True initial SOC for CoulombFromTrueInit.
    double reference_soc_init = 1.0;

    void validate() const;
};

/// Per-step record and summary for one filter kind.
struct FilterRun {
    FilterKind kind = FilterKind::Ekf;
    std::vector<double> soc_est;
    std::vector<double> up_est;
    std::vector<double> residual_v;
    std::vector<double> r0;
    std::vector<double> rp;
    std::vector<double> cp;
    std::vector<double> rx;
    std::vector<double> qx_trace;
    std::vector<double> hph;

    double rmse_pct = 0.0;
    double mae_pct = 0.0;

    long negative_rx = 0;
    long nonphysical_params = 0;
    long ident_windup_steps = 0;
    long update_failures = 0;
    bool soc_clamped = false;
};

struct RunResult {
    std::vector<double> time_s;
    std::vector<double> reference;
    std::vector<FilterRun> filters;
    long cutoff_events = 0;

    std::size_t steps() const noexcept { return time_s.size(); }
    /// Throws Error(InvalidArgument) if the kind was not run.
    const FilterRun& run(FilterKind kind) const;
};

double rmse_pct(std::span<const double> est, std::span<const double> ref);
double mae_pct(std::span<const double> est, std::span<const double> ref);

/// Reference SOC for scoring. SimTruth takes the simulator's SOC (from
/// `truth` when given, otherwise the soc_ref column the simulator carried into
/// the samples); ProvidedColumn takes the samples' soc_ref column;
/// CoulombFromTrueInit integrates the clean current of `truth` when given,
/// else the measured current, from config.reference_soc_init.
std::vector<double> build_reference(const RunConfig& config, const MeasuredTrace& samples,
                                    const TruthTrace* truth = nullptr);

/// Joint online identification and SOC estimation. Every requested filter
/// kind owns its own RLS identifier, fed with Ue(k) = OCV(soc_est(k-1)) - Ut(k).
RunResult run_joint(const RunConfig& config, const MeasuredTrace& samples,
                    const TruthTrace* truth = nullptr);

}  // namespace socest
