/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "socest/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace socest {

namespace {

double clamp_soc(double soc) noexcept
{
    if (std::isnan(soc)) {
        return soc;
    }
    return std::clamp(soc, 0.0, 1.0);
}

[[noreturn]] void invalid(const std::string& what)
{
    throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace

void BatterySpec::validate() const
{
    if (!(capacity_as > 0.0) || !std::isfinite(capacity_as)) {
        invalid("battery capacity must be positive");
    }
    if (!(coulombic_efficiency > 0.0 && coulombic_efficiency <= 1.0)) {
        invalid("coulombic efficiency must lie in (0, 1]");
    }
    if (!(v_min < v_max)) {
        invalid("v_min must be below v_max");
    }
    if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
        invalid("sample interval must be positive");
    }
}

OcvCurve OcvCurve::reference_nmc()
{
    return OcvCurve({-0.5061, 11.1208, -27.5840, 25.9496, -10.4888, 2.3296, 3.3398});
}

double OcvCurve::eval(double soc) const noexcept
{
    const double z = clamp_soc(soc);
    double acc = 0.0;
    for (double k : coeffs_) {
        acc = acc * z + k;
    }
    return acc;
}

double OcvCurve::slope(double soc) const noexcept
{
    const double z = clamp_soc(soc);
    double acc = 0.0;
    for (int i = 0; i < 6; ++i) {
        acc = acc * z + static_cast<double>(6 - i) * coeffs_[static_cast<size_t>(i)];
    }
    return acc;
}

void OcvCurve::validate(double v_lo, double v_hi) const
{
    for (double k : coeffs_) {
        if (!std::isfinite(k)) {
            invalid("OCV coefficients must be finite");
        }
    }
    for (int i = 0; i <= 100; ++i) {
        const double z = i / 100.0;
        const double v = eval(z);
        if (v < v_lo || v > v_hi) {
            std::ostringstream os;
            os << "OCV curve leaves [" << v_lo << ", " << v_hi << "] V at SOC " << z << " (" << v
               << " V)";
            invalid(os.str());
        }
    }
}

bool TheveninParams::valid() const noexcept
{
    return r0_ohm > 0.0 && rp_ohm > 0.0 && cp_f > 0.0 && std::isfinite(r0_ohm) &&
           std::isfinite(rp_ohm) && std::isfinite(cp_f) && tau_s() > 0.0;
}

void TheveninParams::validate() const
{
    if (!valid()) {
        invalid("Thevenin parameters must be finite and strictly positive");
    }
}

CoulombResult coulomb_step(double soc, double current_a, const BatterySpec& spec) noexcept
{
    const double next =
        soc - (spec.coulombic_efficiency * spec.dt_s * current_a) / spec.capacity_as;
    if (next < 0.0) {
        return {0.0, true};
    }
    if (next > 1.0) {
        return {1.0, true};
    }
    return {next, false};
}

EcmState thevenin_step(const EcmState& state, const TheveninParams& params, double current_a,
                       const BatterySpec& spec) noexcept
{
    const auto cc = coulomb_step(state.soc, current_a, spec);
    const double decay = std::exp(-spec.dt_s / params.tau_s());
    EcmState next;
    next.soc = cc.soc;
    next.up_v = decay * state.up_v + params.rp_ohm * (1.0 - decay) * current_a;
    next.soc_clamped = state.soc_clamped || cc.out_of_range;
    return next;
}

double terminal_voltage(const EcmState& state, const TheveninParams& params, double current_a,
                        const OcvCurve& curve) noexcept
{
    return curve.eval(state.soc) - state.up_v - params.r0_ohm * current_a;
}

DiscreteCoeffs discrete_from_params(const TheveninParams& params, double dt_s) noexcept
{
    const double tau = params.tau_s();
    const double den = 2.0 * tau + dt_s;
    const double series = (params.r0_ohm + params.rp_ohm) * dt_s;
    return {
        (series + 2.0 * params.r0_ohm * tau) / den,
        (series - 2.0 * params.r0_ohm * tau) / den,
        (2.0 * tau - dt_s) / den,
    };
}

Inversion invert_coeffs(const DiscreteCoeffs& c, double dt_s) noexcept
{
    Inversion out;
    if (!(c.d2 > -1.0 && c.d2 < 1.0) || !std::isfinite(c.d0) || !std::isfinite(c.d1)) {
        out.status = ErrorKind::InvalidCoeffs;
        return out;
    }
    const double tau = 0.5 * dt_s * (1.0 + c.d2) / (1.0 - c.d2);
    const double r0 = (c.d0 - c.d1) / (1.0 + c.d2);
    const double rp = (c.d0 + c.d1) / (1.0 - c.d2) - r0;
    out.params = {r0, rp, tau / rp};
    if (!out.params.valid()) {
        out.status = ErrorKind::NonPhysical;
        return out;
    }
    out.ok = true;
    return out;
}

TheveninParams params_from_discrete(const DiscreteCoeffs& coeffs, double dt_s)
{
    const Inversion inv = invert_coeffs(coeffs, dt_s);
    if (!inv.ok) {
        std::ostringstream os;
        os << "cannot recover Thevenin parameters from d = [" << coeffs.d0 << ", " << coeffs.d1
           << ", " << coeffs.d2 << "]";
        throw Error(inv.status, os.str());
    }
    return inv.params;
}

}  // namespace socest
