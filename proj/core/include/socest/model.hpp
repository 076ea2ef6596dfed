/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>

#include "socest/error.hpp"

namespace socest {

/// Physical constants of one cell. Current is positive on discharge.
struct BatterySpec {
    double capacity_as = 2.0383 * 3600.0;  ///< usable capacity Qn [A*s]
    double coulombic_efficiency = 1.0;     ///< eta, dimensionless
    double v_max = 4.2;                    ///< charge cutoff [V]
    double v_min = 2.75;                   ///< discharge cutoff [V]
    double dt_s = 1.0;                     ///< sample interval [s]

    /// Throws Error(InvalidArgument) when an invariant is violated.
    void validate() const;
};

/// Degree-6 OCV(SOC) polynomial, coefficients stored highest power first.
class OcvCurve {
public:
    using Coeffs = std::array<double, 7>;

    OcvCurve() = default;
    explicit OcvCurve(const Coeffs& coeffs) : coeffs_(coeffs) {}

    /// Curve identified for the reference 18650 NMC cell.
    static OcvCurve reference_nmc();

    const Coeffs& coeffs() const noexcept { return coeffs_; }

    /// Polynomial value at soc, clamped to [0, 1] first.
    double eval(double soc) const noexcept;
    /// Analytic dOCV/dSOC at soc, clamped to [0, 1] first.
    double slope(double soc) const noexcept;

    /// Rejects curves leaving [v_lo, v_hi] anywhere on a 101-point SOC grid.
    void validate(double v_lo = 1.0, double v_hi = 5.5) const;

private:
    Coeffs coeffs_{};
};

inline double ocv_eval(const OcvCurve& curve, double soc) noexcept { return curve.eval(soc); }
inline double ocv_slope(const OcvCurve& curve, double soc) noexcept { return curve.slope(soc); }

struct TheveninParams {
    double r0_ohm = 0.05;
    double rp_ohm = 0.03;
    double cp_f = 1000.0;

    double tau_s() const noexcept { return rp_ohm * cp_f; }
    bool valid() const noexcept;
    void validate() const;
};

/// Model state [SOC, Up]. soc_clamped is sticky: once a step clamps SOC it
/// stays set for every state derived from that one.
struct EcmState {
    double soc = 1.0;
    double up_v = 0.0;
    bool soc_clamped = false;
};

/// Bilinear-discretized coefficients of Ue(k) = d0*I(k) + d1*I(k-1) + d2*Ue(k-1).
struct DiscreteCoeffs {
    double d0 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

struct CoulombResult {
    double soc;
    bool out_of_range;
};

CoulombResult coulomb_step(double soc, double current_a, const BatterySpec& spec) noexcept;

/// Exact zero-order-hold propagation of [SOC, Up] over one sample.
EcmState thevenin_step(const EcmState& state, const TheveninParams& params, double current_a,
                       const BatterySpec& spec) noexcept;

double terminal_voltage(const EcmState& state, const TheveninParams& params, double current_a,
                        const OcvCurve& curve) noexcept;

DiscreteCoeffs discrete_from_params(const TheveninParams& params, double dt_s) noexcept;

/// Non-throwing inverse of discrete_from_params. On failure `status` holds
/// InvalidCoeffs or NonPhysical and `params` holds whatever was recovered.
struct Inversion {
    TheveninParams params;
    bool ok = false;
    ErrorKind status = ErrorKind::InvalidCoeffs;
};

Inversion invert_coeffs(const DiscreteCoeffs& coeffs, double dt_s) noexcept;

/// Throwing form of invert_coeffs.
TheveninParams params_from_discrete(const DiscreteCoeffs& coeffs, double dt_s);

}  // namespace socest
