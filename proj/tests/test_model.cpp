/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "socest/model.hpp"

using namespace socest;

namespace {

OcvCurve curve_of(const double (&k)[7])
{
    OcvCurve::Coeffs c{};
    for (int i = 0; i < 7; ++i) c[i] = k[i];
    return OcvCurve(c);
}

constexpr double kCapacity = 2.0383 * 3600.0;

}  // namespace

TEST(OcvEval, ReferenceCurveAtZeroIsConstantTerm)
{
    EXPECT_EQ(ocv_eval(OcvCurve::reference_nmc(), 0.0), 3.3398);
}

TEST(OcvEval, ReferenceCurveAtOneIsCoefficientSum)
{
    double sum = 0.0;
    for (double k : oracle::kRefCoeffs) sum += k;
    EXPECT_NEAR(sum, 4.1609, 1e-12);
    EXPECT_NEAR(ocv_eval(OcvCurve::reference_nmc(), 1.0), sum, 1e-12);
}

TEST(OcvEval, ReferenceCoefficientsMatchLiteral)
{
    const auto& c = OcvCurve::reference_nmc().coeffs();
    for (int i = 0; i < 7; ++i) EXPECT_EQ(c[i], oracle::kRefCoeffs[i]) << i;
}

TEST(OcvEval, ZeroPolynomial)
{
    EXPECT_EQ(ocv_eval(OcvCurve{}, 0.5), 0.0);
}

TEST(OcvEval, MatchesPowerSumOracle)
{
    const auto curve = OcvCurve::reference_nmc();
    for (int i = 0; i <= 100; ++i) {
        const double z = i / 100.0;
        EXPECT_NEAR(curve.eval(z), oracle::poly(oracle::kRefCoeffs, z), 1e-12) << z;
    }
}

TEST(OcvEval, ClampsOutsideUnitInterval)
{
    const auto curve = OcvCurve::reference_nmc();
    EXPECT_EQ(curve.eval(-0.3), curve.eval(0.0));
    EXPECT_EQ(curve.eval(1.7), curve.eval(1.0));
    EXPECT_EQ(curve.slope(-0.3), curve.slope(0.0));
    EXPECT_EQ(curve.slope(1.7), curve.slope(1.0));
}

TEST(OcvSlope, ConstantCurveIsFlat)
{
    const OcvCurve c({0, 0, 0, 0, 0, 0, 3.7});
    for (double z : {0.0, 0.3, 1.0}) EXPECT_EQ(ocv_slope(c, z), 0.0);
}

TEST(OcvSlope, LinearCurveHasUnitSlope)
{
    const OcvCurve c({0, 0, 0, 0, 0, 1, 0});
    for (double z : {0.0, 0.3, 1.0}) EXPECT_EQ(ocv_slope(c, z), 1.0);
}

TEST(OcvSlope, ReferenceAtHalfMatchesFiniteDifference)
{
    const auto curve = OcvCurve::reference_nmc();
    const double fd =
        oracle::central_diff([](double z) { return oracle::poly(oracle::kRefCoeffs, z); }, 0.5);
    EXPECT_LT(oracle::rel_err(ocv_slope(curve, 0.5), fd), 1e-6);
}

TEST(OcvSlope, PropertyRandomCurvesMatchFiniteDifference)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coeff(-30.0, 30.0);
    std::uniform_real_distribution<double> soc(0.01, 0.99);
    for (int trial = 0; trial < 20; ++trial) {
        double k[7];
        for (double& v : k) v = coeff(rng);
        const auto curve = curve_of(k);
        for (int i = 0; i < 100; ++i) {
            const double z = soc(rng);
            const double fd = oracle::central_diff([&](double s) { return oracle::poly(k, s); }, z);
            const double s = curve.slope(z);
            EXPECT_LE(std::abs(s - fd), 1e-6 * std::max(1.0, std::abs(fd))) << trial << ' ' << z;
        }
    }
}

TEST(OcvCurveValidate, ReferencePassesGate)
{
    EXPECT_NO_THROW(OcvCurve::reference_nmc().validate());
}

TEST(OcvCurveValidate, RejectsCurveOutsideVoltageWindow)
{
    EXPECT_THROW(OcvCurve({0, 0, 0, 0, 0, 0, 0.5}).validate(), Error);
    EXPECT_THROW(OcvCurve({0, 0, 0, 0, 0, 10, 3.0}).validate(), Error);
    EXPECT_NO_THROW(OcvCurve({0, 0, 0, 0, 0, 0, 0.5}).validate(0.0, 1.0));
}

TEST(BatterySpecValidate, DefaultsAreValid)
{
    const BatterySpec spec;
    EXPECT_NO_THROW(spec.validate());
    EXPECT_DOUBLE_EQ(spec.capacity_as, kCapacity);
}

TEST(BatterySpecValidate, RejectsBrokenInvariants)
{
    auto bad = [](auto mutate) {
        BatterySpec s;
        mutate(s);
        try {
            s.validate();
        } catch (const Error& e) {
            return e.kind() == ErrorKind::InvalidArgument;
        }
        return false;
    };
    EXPECT_TRUE(bad([](BatterySpec& s) { s.capacity_as = 0; }));
    EXPECT_TRUE(bad([](BatterySpec& s) { s.coulombic_efficiency = 0; }));
    EXPECT_TRUE(bad([](BatterySpec& s) { s.coulombic_efficiency = 1.01; }));
    EXPECT_TRUE(bad([](BatterySpec& s) { s.v_min = s.v_max; }));
    EXPECT_TRUE(bad([](BatterySpec& s) { s.dt_s = 0; }));
    EXPECT_TRUE(bad([](BatterySpec& s) { s.dt_s = std::nan(""); }));
}

TEST(TheveninParamsValidate, RejectsNonPositive)
{
    EXPECT_TRUE(TheveninParams{}.valid());
    EXPECT_FALSE((TheveninParams{0.0, 0.03, 1000}).valid());
    EXPECT_FALSE((TheveninParams{0.05, -0.03, 1000}).valid());
    EXPECT_FALSE((TheveninParams{0.05, 0.03, 0}).valid());
    EXPECT_THROW((TheveninParams{0.05, 0.03, 0}).validate(), Error);
    EXPECT_DOUBLE_EQ(TheveninParams{}.tau_s(), 30.0);
}

TEST(CoulombStep, ZeroCurrentHoldsSoc)
{
    const auto r = coulomb_step(0.5, 0.0, BatterySpec{});
    EXPECT_EQ(r.soc, 0.5);
    EXPECT_FALSE(r.out_of_range);
}

TEST(CoulombStep, OneCForOneSecond)
{
    const auto r = coulomb_step(0.5, 2.0383, BatterySpec{});
    EXPECT_NEAR(r.soc, 0.5 - 1.0 / 3600.0, 1e-12);
    EXPECT_NEAR(r.soc, 0.4997222, 1e-7);
}

TEST(CoulombStep, ClampsAndFlagsAtBothEnds)
{
    const auto lo = coulomb_step(0.0, 1.0, BatterySpec{});
    EXPECT_EQ(lo.soc, 0.0);
    EXPECT_TRUE(lo.out_of_range);
    const auto hi = coulomb_step(1.0, -1.0, BatterySpec{});
    EXPECT_EQ(hi.soc, 1.0);
    EXPECT_TRUE(hi.out_of_range);
}

TEST(CoulombStep, EfficiencyScalesThroughput)
{
    BatterySpec spec;
    spec.coulombic_efficiency = 0.5;
    EXPECT_NEAR(0.5 - coulomb_step(0.5, 2.0383, spec).soc, 0.5 / 3600.0, 1e-15);
}

TEST(CoulombStep, PropertyFullOneCDischargeEndsAtZero)
{
    const BatterySpec spec;
    double soc = 1.0;
    bool flagged = false;
    for (int k = 0; k < 3600; ++k) {
        const auto r = coulomb_step(soc, 2.0383, spec);
        soc = r.soc;
        flagged = flagged || r.out_of_range;
    }
    EXPECT_NEAR(soc, 0.0, 1e-9);
}

TEST(TheveninStep, ZeroInputFixedPoint)
{
    const EcmState s{0.6, 0.0, false};
    const auto n = thevenin_step(s, TheveninParams{}, 0.0, BatterySpec{});
    EXPECT_EQ(n.soc, 0.6);
    EXPECT_EQ(n.up_v, 0.0);
}

TEST(TheveninStep, OneAmpFromRest)
{
    const auto n = thevenin_step({0.5, 0.0, false}, TheveninParams{}, 1.0, BatterySpec{});
    EXPECT_NEAR(n.up_v, 0.03 * (1.0 - std::exp(-1.0 / 30.0)), 1e-15);
    EXPECT_NEAR(n.up_v, 9.835e-4, 5e-7);
    EXPECT_NEAR(n.soc, 0.5 - 1.0 / kCapacity, 1e-15);
}

TEST(TheveninStep, ConstantCurrentSettlesAtRpTimesI)
{
    BatterySpec spec;
    spec.capacity_as = 1e12;
    EcmState s{0.5, 0.0, false};
    for (int k = 0; k < 2000; ++k) s = thevenin_step(s, TheveninParams{}, 1.5, spec);
    EXPECT_NEAR(s.up_v, 0.03 * 1.5, 1e-12);
}

TEST(TheveninStep, ClampFlagIsSticky)
{
    EcmState s{0.0, 0.0, false};
    s = thevenin_step(s, TheveninParams{}, 1.0, BatterySpec{});
    EXPECT_TRUE(s.soc_clamped);
    s = thevenin_step(s, TheveninParams{}, -1.0, BatterySpec{});
    EXPECT_TRUE(s.soc_clamped);
    EXPECT_GT(s.soc, 0.0);
}

TEST(TheveninStep, PropertyZeroCurrentContractsPolarization)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(1e-3, 1.0), c(10.0, 1e5), up(-0.5, 0.5);
    for (int i = 0; i < 500; ++i) {
        const TheveninParams p{r(rng), r(rng), c(rng)};
        const double u = up(rng);
        const auto n = thevenin_step({0.5, u, false}, p, 0.0, BatterySpec{});
        EXPECT_LT(std::abs(n.up_v), std::abs(u));
        EXPECT_NEAR(n.up_v, u * std::exp(-1.0 / p.tau_s()), 1e-15);
    }
}

TEST(TerminalVoltage, OpenCircuitEqualsOcv)
{
    const auto curve = OcvCurve::reference_nmc();
    EXPECT_EQ(terminal_voltage({0.7, 0.0, false}, TheveninParams{}, 0.0, curve), curve.eval(0.7));
}

TEST(TerminalVoltage, FullCellOneAmp)
{
    EXPECT_NEAR(terminal_voltage({1.0, 0.0, false}, TheveninParams{}, 1.0, OcvCurve::reference_nmc()),
                4.1109, 1e-12);
}

TEST(TerminalVoltage, SignConvention)
{
    const auto curve = OcvCurve::reference_nmc();
    EXPECT_GT(terminal_voltage({0.5, 0.0, false}, TheveninParams{}, -1.0, curve), curve.eval(0.5));
    EXPECT_LT(terminal_voltage({0.5, 0.0, false}, TheveninParams{}, 1.0, curve), curve.eval(0.5));
    EXPECT_NEAR(terminal_voltage({0.5, 0.01, false}, TheveninParams{}, 0.0, curve),
                curve.eval(0.5) - 0.01, 1e-15);
}

TEST(DiscreteFromParams, HandSubstitution)
{
    const auto d = discrete_from_params(TheveninParams{}, 1.0);
    EXPECT_NEAR(d.d0, 3.08 / 61.0, 1e-15);
    EXPECT_NEAR(d.d1, -2.92 / 61.0, 1e-15);
    EXPECT_NEAR(d.d2, 59.0 / 61.0, 1e-15);
    EXPECT_NEAR(d.d0, 0.0504918, 1e-7);
    EXPECT_NEAR(d.d1, -0.0478689, 1e-7);
    EXPECT_NEAR(d.d2, 0.9672131, 1e-7);
}

TEST(DiscreteFromParams, TimeConstantLimits)
{
    EXPECT_GT(discrete_from_params({0.05, 0.03, 1e9}, 1.0).d2, 1.0 - 1e-6);
    EXPECT_LT(discrete_from_params({0.05, 0.03, 1e9}, 1.0).d2, 1.0);
    EXPECT_LT(discrete_from_params({0.05, 0.03, 1e-6}, 1.0).d2, -1.0 + 1e-6);
    EXPECT_GT(discrete_from_params({0.05, 0.03, 1e-6}, 1.0).d2, -1.0);
}

TEST(DiscreteFromParams, PropertyMatchesTermwiseOracle)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> r(1e-3, 1.0), lc(1.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double r0 = r(rng), rp = r(rng), cp = std::pow(10.0, lc(rng));
        for (double dt : {0.1, 1.0, 10.0}) {
            const auto d = discrete_from_params({r0, rp, cp}, dt);
            const auto o = oracle::bilinear(r0, rp, cp, dt);
            EXPECT_NEAR(d.d0, o.d0, 1e-14);
            EXPECT_NEAR(d.d1, o.d1, 1e-14);
            EXPECT_NEAR(d.d2, o.d2, 1e-14);
        }
    }
}

TEST(ParamsFromDiscrete, InvertsHandExample)
{
    const auto p = params_from_discrete({0.0504918, -0.0478689, 0.9672131}, 1.0);
    EXPECT_LT(oracle::rel_err(p.r0_ohm, 0.05), 1e-4);
    EXPECT_LT(oracle::rel_err(p.rp_ohm, 0.03), 1e-4);
    EXPECT_LT(oracle::rel_err(p.cp_f, 1000.0), 1e-4);
}

TEST(ParamsFromDiscrete, BoundaryD2IsInvalidCoeffs)
{
    for (double d2 : {1.0, -1.0, 1.5, std::nan("")}) {
        try {
            params_from_discrete({0.05, -0.04, d2}, 1.0);
            ADD_FAILURE() << d2;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidCoeffs) << d2;
        }
    }
}

TEST(ParamsFromDiscrete, ZeroOhmicResistanceIsNonPhysical)
{
    try {
        params_from_discrete({0.02, 0.02, 0.9}, 1.0);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPhysical);
    }
    const auto inv = invert_coeffs({0.02, 0.02, 0.9}, 1.0);
    EXPECT_FALSE(inv.ok);
    EXPECT_EQ(inv.status, ErrorKind::NonPhysical);
}

TEST(ParamsFromDiscrete, NegativePolarizationIsNonPhysical)
{
    // d0 + d1 small relative to R0 gives Rp < 0.
    const auto inv = invert_coeffs({0.05, -0.049, 0.5}, 1.0);
    EXPECT_FALSE(inv.ok);
    EXPECT_EQ(inv.status, ErrorKind::NonPhysical);
}

TEST(ParamsFromDiscrete, PropertyRoundTripBothDirections)
{
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(1e-3, 1.0), lc(1.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const TheveninParams p{r(rng), r(rng), std::pow(10.0, lc(rng))};
        for (double dt : {0.1, 1.0, 10.0}) {
            const auto d = discrete_from_params(p, dt);
            const auto q = params_from_discrete(d, dt);
            // d2 rounds to within eps of 1 - 2dt/tau; Rp is a difference of order R0.
            const double tau = p.rp_ohm * p.cp_f;
            const double kappa = (tau / dt) * (1.0 + p.r0_ohm / p.rp_ohm);
            const double tol = std::max(1e-10, 16.0 * kEps * kappa);
            EXPECT_LT(oracle::rel_err(q.r0_ohm, p.r0_ohm), tol);
            EXPECT_LT(oracle::rel_err(q.rp_ohm, p.rp_ohm), tol);
            EXPECT_LT(oracle::rel_err(q.cp_f, p.cp_f), tol);
            const auto d2 = discrete_from_params(q, dt);
            EXPECT_LT(oracle::rel_err(d2.d0, d.d0), 1e-10);
            EXPECT_LT(oracle::rel_err(d2.d1, d.d1), 1e-10);
            EXPECT_LT(oracle::rel_err(d2.d2, d.d2), 1e-10);
        }
    }
}

TEST(ErrorKindNames, AllKindsHaveNames)
{
    for (auto k : {ErrorKind::InvalidArgument, ErrorKind::InvalidCoeffs, ErrorKind::NonPhysical,
                   ErrorKind::Degenerate, ErrorKind::IllConditioned, ErrorKind::SingularInnovation,
                   ErrorKind::RiccatiBlowup, ErrorKind::EmptyWindow, ErrorKind::LengthMismatch,
                   ErrorKind::EmptyInput, ErrorKind::MissingReferenceSource}) {
        EXPECT_FALSE(std::string(to_string(k)).empty());
    }
}
