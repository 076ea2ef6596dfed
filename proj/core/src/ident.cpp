/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "socest/ident.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace socest {

FfrlsState FfrlsState::make(const Eigen::VectorXd& theta0, double cov_scale, double lambda,
                            double trace_cap)
{
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "forgetting factor must lie in (0, 1]");
    }
    if (!(cov_scale >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "initial covariance scale must be non-negative");
    }
    FfrlsState s;
    s.theta = theta0;
    s.cov = Eigen::MatrixXd::Identity(theta0.size(), theta0.size()) * cov_scale;
    s.lambda = lambda;
    s.trace_cap = trace_cap;
    return s;
}

FfrlsState ffrls_step(const FfrlsState& state, const RegressorSample& sample)
{
    if (sample.phi.size() != state.dim()) {
        throw Error(ErrorKind::LengthMismatch, "regressor length does not match estimator dimension");
    }
    const Eigen::VectorXd cov_phi = state.cov * sample.phi;
    const double phi_cov_phi = sample.phi.dot(cov_phi);

    FfrlsState next = state;
    double lambda = state.lambda;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const double denom = lambda + phi_cov_phi;
        if (!(denom > 0.0) || !std::isfinite(denom)) {
            throw Error(ErrorKind::Degenerate, "RLS innovation variance is not positive");
        }
        const Eigen::VectorXd gain = cov_phi / denom;
        const double err = sample.y - sample.phi.dot(state.theta);
        next.theta = state.theta + gain * err;
        next.cov = (state.cov - gain * cov_phi.transpose()) / lambda;
        next.cov = 0.5 * (next.cov + next.cov.transpose()).eval();
        if (lambda == 1.0 || next.cov.trace() <= state.trace_cap) {
            break;
        }
        // Covariance would exceed the cap: redo the step without forgetting.
        lambda = 1.0;
        next.windup = true;
        ++next.windup_steps;
    }
    return next;
}

FfrlsState make_ocv_ident_state(double ocv_init, double r0_init, double cov_scale, double lambda)
{
    return FfrlsState::make(Eigen::Vector2d(ocv_init, r0_init), cov_scale, lambda);
}

OcvIdentResult ocv_ident_step(const FfrlsState& state, double current_a, double terminal_v)
{
    if (state.dim() != 2) {
        throw Error(ErrorKind::LengthMismatch, "OCV identification needs a 2-parameter estimator");
    }
    RegressorSample sample{Eigen::Vector2d(1.0, -current_a), terminal_v};
    FfrlsState next = ffrls_step(state, sample);
    const double ocv = next.theta[0];
    return {std::move(next), ocv};
}

namespace {

Eigen::Matrix<double, 7, 1> monomials(double z)
{
    Eigen::Matrix<double, 7, 1> phi;
    double p = 1.0;
    for (int i = 6; i >= 0; --i) {
        phi[i] = p;
        p *= z;
    }
    return phi;
}

}  // namespace

double polynomial_condition(std::span<const double> soc)
{
    Eigen::Matrix<double, 7, 7> normal = Eigen::Matrix<double, 7, 7>::Zero();
    for (double z : soc) {
        const auto phi = monomials(z);
        normal.noalias() += phi * phi.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> eig(normal,
                                                                   Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return hi / lo;
}

OcvCurve fit_ocv_polynomial(std::span<const double> soc, std::span<const double> ocv,
                            const PolyFitOptions& options)
{
    if (soc.size() != ocv.size()) {
        throw Error(ErrorKind::LengthMismatch, "SOC and OCV sequences differ in length");
    }
    if (soc.size() < 7) {
        throw Error(ErrorKind::IllConditioned, "at least 7 samples are needed for a degree-6 fit");
    }
    const auto [lo, hi] = std::minmax_element(soc.begin(), soc.end());
    if (*hi - *lo < options.min_soc_range) {
        std::ostringstream os;
        os << "SOC samples span only " << (*hi - *lo) << " (need " << options.min_soc_range << ")";
        throw Error(ErrorKind::IllConditioned, os.str());
    }
    const double cond = polynomial_condition(soc);
    if (!(cond < options.max_condition)) {
        std::ostringstream os;
        os << "polynomial normal matrix condition " << cond << " exceeds " << options.max_condition;
        throw Error(ErrorKind::IllConditioned, os.str());
    }

    // Regress on u = (z - mid) / half so the powers stay in [-1, 1], then
    // expand back to monomials in z.
    const double mid = 0.5 * (*hi + *lo);
    const double half = 0.5 * (*hi - *lo);
    FfrlsState state = FfrlsState::make(Eigen::VectorXd::Zero(7), options.cov_scale,
                                        options.lambda, std::numeric_limits<double>::infinity());
    RegressorSample sample{Eigen::VectorXd(7), 0.0};
    for (size_t i = 0; i < soc.size(); ++i) {
        sample.phi = monomials((soc[i] - mid) / half);
        sample.y = ocv[i];
        state = ffrls_step(state, sample);
    }

    // Horner in polynomial arithmetic, ascending powers of z.
    std::array<double, 7> q{};
    const double a = 1.0 / half;
    const double b = -mid / half;
    q[0] = state.theta[0];
    for (int j = 1; j < 7; ++j) {
        std::array<double, 7> next{};
        for (int p = 0; p < 6; ++p) {
            next[static_cast<size_t>(p)] += b * q[static_cast<size_t>(p)];
            next[static_cast<size_t>(p + 1)] += a * q[static_cast<size_t>(p)];
        }
        next[0] += state.theta[j];
        q = next;
    }
    OcvCurve::Coeffs coeffs{};
    for (int i = 0; i < 7; ++i) {
        coeffs[static_cast<size_t>(i)] = q[static_cast<size_t>(6 - i)];
    }
    return OcvCurve(coeffs);
}

double ffrls_centroid(long samples, double lambda)
{
    if (samples < 1) {
        throw Error(ErrorKind::InvalidArgument, "centroid needs at least one sample");
    }
    const double n = static_cast<double>(samples);
    if (lambda == 1.0) {
        return 0.5 * (n - 1.0);
    }
    const double ln = std::pow(lambda, n);
    const double s0 = (1.0 - ln) / (1.0 - lambda);
    const double s1 =
        lambda * (1.0 - n * ln / lambda + (n - 1.0) * ln) / ((1.0 - lambda) * (1.0 - lambda));
    return s1 / s0;
}

FfrlsState make_thevenin_ident_state(double lambda, double cov_scale, const DiscreteCoeffs& theta0,
                                     double trace_cap)
{
    return FfrlsState::make(Eigen::Vector3d(theta0.d0, theta0.d1, theta0.d2), cov_scale, lambda,
                            trace_cap);
}

TheveninIdentResult thevenin_ident_step(const FfrlsState& state, double i_k, double i_prev,
                                        double ue_k, double ue_prev)
{
    if (state.dim() != 3) {
        throw Error(ErrorKind::LengthMismatch,
                    "Thevenin identification needs a 3-parameter estimator");
    }
    RegressorSample sample{Eigen::Vector3d(i_k, i_prev, ue_prev), ue_k};
    FfrlsState next = ffrls_step(state, sample);
    const DiscreteCoeffs coeffs{next.theta[0], next.theta[1], next.theta[2]};
    return {std::move(next), coeffs};
}

}  // namespace socest
