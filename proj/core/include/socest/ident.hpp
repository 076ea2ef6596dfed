/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <span>

#include <Eigen/Dense>

#include "socest/model.hpp"

namespace socest {

/// Exponentially weighted recursive least squares estimate.
///
/// `cov` is kept symmetric after every step. When a step would push
/// trace(cov) above `trace_cap` the forgetting is suspended for that step
/// (lambda treated as 1) and `windup` is latched so callers can see that the
/// data stopped exciting the parameters.
struct FfrlsState {
    Eigen::VectorXd theta;
    Eigen::MatrixXd cov;
    double lambda = 1.0;
    double trace_cap = 1e9;
    bool windup = false;
    long windup_steps = 0;

    /// theta0 with cov = cov_scale * I.
    static FfrlsState make(const Eigen::VectorXd& theta0, double cov_scale, double lambda,
                           double trace_cap = 1e9);

    Eigen::Index dim() const noexcept { return theta.size(); }
};

struct RegressorSample {
    Eigen::VectorXd phi;
    double y = 0.0;
};

FfrlsState ffrls_step(const FfrlsState& state, const RegressorSample& sample);

/// Rint-model OCV extraction: theta = [OCV, R0], phi = [1, -I], y = Ut.
struct OcvIdentResult {
    FfrlsState state;
    double ocv_estimate;
};

FfrlsState make_ocv_ident_state(double ocv_init = 4.0, double r0_init = 1e-3,
                                double cov_scale = 1e6, double lambda = 0.996);
OcvIdentResult ocv_ident_step(const FfrlsState& state, double current_a, double terminal_v);

struct PolyFitOptions {
    double lambda = 1.0;
    double cov_scale = 1e10;
    double min_soc_range = 0.3;
    double max_condition = 1e12;
};

/// Fits the degree-6 OCV polynomial by running RLS over (soc, ocv) pairs.
/// Throws Error(IllConditioned) when the SOC samples cannot excite every power.
OcvCurve fit_ocv_polynomial(std::span<const double> soc, std::span<const double> ocv,
                            const PolyFitOptions& options = {});

/// Weighted mean age, in samples, of the data behind an RLS estimate after
/// `samples` steps with forgetting factor `lambda`. Tends to lambda / (1 - lambda).
double ffrls_centroid(long samples, double lambda);

/// Condition number of the (unweighted) monomial normal matrix for these SOC samples.
double polynomial_condition(std::span<const double> soc);

/// Online Thevenin identification: theta = [d0, d1, d2],
/// phi = [I(k), I(k-1), Ue(k-1)], y = Ue(k) with Ue = OCV - Ut.
struct TheveninIdentResult {
    FfrlsState state;
    DiscreteCoeffs coeffs;
};

FfrlsState make_thevenin_ident_state(double lambda = 0.999, double cov_scale = 1e6,
                                     const DiscreteCoeffs& theta0 = {1e-3, 1e-3, 0.5},
                                     double trace_cap = 1e9);
TheveninIdentResult thevenin_ident_step(const FfrlsState& state, double i_k, double i_prev,
                                        double ue_k, double ue_prev);

}  // namespace socest
