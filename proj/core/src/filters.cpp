/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "socest/filters.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <string>

namespace socest {

std::string_view to_string(FilterKind kind) noexcept
{
    switch (kind) {
    case FilterKind::Ekf: return "ekf";
    case FilterKind::Hiekf: return "hiekf";
    case FilterKind::Ahiekf: return "ahiekf";
    case FilterKind::Iahiekf: return "iahiekf";
    }
    return "?";
}

std::string_view display_name(FilterKind kind) noexcept
{
    switch (kind) {
    case FilterKind::Ekf: return "EKF";
    case FilterKind::Hiekf: return "HIEKF";
    case FilterKind::Ahiekf: return "AHIEKF";
    case FilterKind::Iahiekf: return "IAHIEKF";
    }
    return "?";
}

FilterKind parse_filter_kind(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (FilterKind kind : kAllFilterKinds) {
        if (lower == to_string(kind)) {
            return kind;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown filter kind '" + std::string(name) + "'");
}

namespace {

bool symmetric(const Mat2& m, double tol = 1e-12)
{
    return std::abs(m(0, 1) - m(1, 0)) <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool positive_definite(const Mat2& m)
{
    return m(0, 0) > 0.0 && m.determinant() > 0.0;
}

bool positive_semidefinite(const Mat2& m)
{
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -1e-15 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

Mat2 symmetrize(const Mat2& m)
{
    return 0.5 * (m + m.transpose());
}

void clamp_soc(FilterState& fs)
{
    if (fs.x[0] < 0.0) {
        fs.x[0] = 0.0;
        fs.soc_clamped = true;
    } else if (fs.x[0] > 1.0) {
        fs.x[0] = 1.0;
        fs.soc_clamped = true;
    }
}

}  // namespace

void NoiseConfig::validate() const
{
    if (!symmetric(qx) || !positive_semidefinite(qx)) {
        throw Error(ErrorKind::InvalidArgument, "Qx must be symmetric positive semidefinite");
    }
    if (!(rx > 0.0) || !std::isfinite(rx)) {
        throw Error(ErrorKind::InvalidArgument, "Rx must be positive");
    }
    if (!symmetric(p0) || !positive_definite(p0)) {
        throw Error(ErrorKind::InvalidArgument, "P0 must be symmetric positive definite");
    }
}

void HinfConfig::validate() const
{
    if (!symmetric(sx) || !positive_definite(sx)) {
        throw Error(ErrorKind::InvalidArgument, "Sx must be symmetric positive definite");
    }
    if (!lx.allFinite()) {
        throw Error(ErrorKind::InvalidArgument, "Lx must be finite");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw Error(ErrorKind::InvalidArgument, "gamma must be non-negative");
    }
}

void AdaptiveConfig::validate() const
{
    if (window_len < 1) {
        throw Error(ErrorKind::InvalidArgument, "window length must be at least 1");
    }
    if (!(b > 0.9 && b < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "forgetting base b must lie in (0.9, 1)");
    }
}

void ResidualWindow::push(double residual)
{
    values_.push_back(residual);
    while (values_.size() > capacity_) {
        values_.pop_front();
    }
}

double window_mean(const ResidualWindow& window)
{
    if (window.empty()) {
        throw Error(ErrorKind::EmptyWindow, "residual window is empty");
    }
    double sum = 0.0;
    for (double e : window.values()) {
        sum += e * e;
    }
    return sum / static_cast<double>(window.size());
}

FilterState FilterState::initial(const Vec2& x0, const NoiseConfig& noise, const HinfConfig& hinf,
                                 const AdaptiveConfig& adaptive)
{
    FilterState fs;
    fs.x = x0;
    fs.p = noise.p0;
    fs.noise = noise;
    fs.sx = hinf.sx;
    fs.residuals = ResidualWindow(adaptive.window_len);
    return fs;
}

FilterState predict(const FilterState& fs, const TheveninParams& params, const BatterySpec& spec,
                    double current_a)
{
    const double decay = std::exp(-spec.dt_s / params.tau_s());
    Mat2 a = Mat2::Zero();
    a(0, 0) = 1.0;
    a(1, 1) = decay;
    const Vec2 b(-(spec.coulombic_efficiency * spec.dt_s) / spec.capacity_as,
                 params.rp_ohm * (1.0 - decay));

    FilterState next = fs;
    next.x = a * fs.x + b * current_a;
    next.p = a * fs.p * a.transpose() + fs.noise.qx;
    return next;
}

Innovation innovate(const FilterState& fs, const TheveninParams& params, const OcvCurve& curve,
                    double current_a, double measured_v)
{
    Innovation out;
    const double soc = fs.x[0];
    out.predicted_v = curve.eval(soc) - fs.x[1] - params.r0_ohm * current_a;
    out.h = Row2(curve.slope(soc), -1.0);
    out.residual = measured_v - out.predicted_v;
    return out;
}

UpdateResult ekf_update(const FilterState& fs, const Row2& h, double residual)
{
    const double s = (h * fs.p * h.transpose())(0, 0) + fs.noise.rx;
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::SingularInnovation, "innovation variance is not positive");
    }
    const Vec2 gain = fs.p * h.transpose() / s;

    UpdateResult out{fs, gain};
    out.state.x = fs.x + gain * residual;
    out.state.p = symmetrize((Mat2::Identity() - gain * h) * fs.p);
    return out;
}

UpdateResult hinf_update(const FilterState& fs, const Row2& h, double residual,
                         const HinfConfig& hconf)
{
    const Mat2 s_bar = hconf.lx * fs.sx * hconf.lx.transpose();
    const Mat2& p = fs.p;
    const double rx = fs.noise.rx;
    const Mat2 m = Mat2::Identity() - hconf.gamma * s_bar * p + h.transpose() * h * p / rx;

    const double scale = m.cwiseAbs().maxCoeff();
    const double det = m.determinant();
    if (!std::isfinite(det) || std::abs(det) <= 1e-12 * scale * scale) {
        throw Error(ErrorKind::RiccatiBlowup, "H-infinity gain matrix is singular");
    }
    const Mat2 m_inv = m.inverse();
    const Vec2 gain = p * m_inv * h.transpose() / rx;
    const Mat2 p_next = p * m_inv;

    const double p_scale = std::max(1e-300, p_next.cwiseAbs().maxCoeff());
    if (!p_next.allFinite() || std::abs(p_next(0, 1) - p_next(1, 0)) > 1e-6 * p_scale ||
        !positive_definite(symmetrize(p_next))) {
        throw Error(ErrorKind::RiccatiBlowup,
                    "H-infinity covariance lost positive definiteness (gamma too large)");
    }

    UpdateResult out{fs, gain};
    out.state.sx = s_bar;
    out.state.x = fs.x + gain * residual;
    out.state.p = symmetrize(p_next);
    return out;
}

AdaptResult ahiekf_adapt(const NoiseConfig& noise, const Vec2& gain, const Row2& h,
                         const Mat2& p_prior, double m)
{
    AdaptResult out{noise, false};
    out.noise.qx = gain * m * gain.transpose();
    const double rx = m - (h * p_prior * h.transpose())(0, 0);
    if (rx <= 0.0 || !std::isfinite(rx)) {
        out.noise.rx = kRxFloor;
        out.negative_rx = true;
    } else {
        out.noise.rx = rx;
    }
    return out;
}

double forgetting_weight(long k, double b)
{
    if (k < 1) {
        throw Error(ErrorKind::InvalidArgument, "step index must be at least 1");
    }
    return (1.0 - b) / (1.0 - std::pow(b, static_cast<double>(k)));
}

NoiseConfig iahiekf_adapt(const NoiseConfig& noise, const Vec2& gain, const Row2& h,
                          const Mat2& p_prior, double m, long k, const AdaptiveConfig& aconf)
{
    const double d = forgetting_weight(k, aconf.b);
    const double hph = (h * p_prior * h.transpose())(0, 0);
    NoiseConfig out = noise;
    out.qx = gain * (d * m) * gain.transpose();
    out.rx = (1.0 - d) * m + hph;
    assert(out.rx >= hph);
    return out;
}

FilterStepResult filter_step(FilterKind kind, const FilterState& fs, const TheveninParams& params,
                             const BatterySpec& spec, const OcvCurve& curve,
                             const HinfConfig& hconf, const AdaptiveConfig& aconf,
                             double current_a, double measured_v)
{
    FilterStepResult out;
    FilterState prior = predict(fs, params, spec, current_a);
    prior.step_index = fs.step_index + 1;
    const Innovation inn = innovate(prior, params, curve, current_a, measured_v);

    StepDiagnostics& diag = out.diag;
    diag.predicted_v = inn.predicted_v;
    diag.residual_v = inn.residual;
    diag.hph = (inn.h * prior.p * inn.h.transpose())(0, 0);

    UpdateResult upd{prior, Vec2::Zero()};
    try {
        upd = kind == FilterKind::Ekf ? ekf_update(prior, inn.h, inn.residual)
                                      : hinf_update(prior, inn.h, inn.residual, hconf);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularInnovation && e.kind() != ErrorKind::RiccatiBlowup) {
            throw;
        }
        upd = UpdateResult{prior, Vec2::Zero()};
        ++upd.state.update_failures;
        diag.update_failed = true;
    }
    FilterState& next = upd.state;
    clamp_soc(next);

    if ((kind == FilterKind::Ahiekf || kind == FilterKind::Iahiekf) && !diag.update_failed) {
        next.residuals.push(inn.residual);
        const double m = window_mean(next.residuals);
        if (kind == FilterKind::Ahiekf) {
            const AdaptResult ad = ahiekf_adapt(next.noise, upd.gain, inn.h, prior.p, m);
            next.noise = ad.noise;
            if (ad.negative_rx) {
                ++next.negative_rx_count;
                diag.negative_rx = true;
            }
        } else {
            next.noise = iahiekf_adapt(next.noise, upd.gain, inn.h, prior.p, m,
                                       next.step_index, aconf);
        }
    }

    diag.gain = upd.gain;
    diag.qx_trace = next.noise.qx.trace();
    diag.rx = next.noise.rx;
    out.soc = next.x[0];
    out.state = std::move(next);
    return out;
}

}  // namespace socest
