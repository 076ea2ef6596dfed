/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "socest/ident.hpp"

using namespace socest;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Piecewise-constant random current, hold times 1..20 samples.
std::vector<double> rich_current(std::size_t n, std::uint64_t seed, double amp = 3.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> level(-amp, amp);
    std::uniform_int_distribution<int> hold(1, 20);
    std::vector<double> out;
    while (out.size() < n) {
        const double v = level(rng);
        for (int h = hold(rng); h > 0 && out.size() < n; --h) out.push_back(v);
    }
    return out;
}

double asym(const MatrixXd& m)
{
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(FfrlsState, MakeValidatesArguments)
{
    EXPECT_THROW(FfrlsState::make(VectorXd::Zero(2), 1.0, 0.0), Error);
    EXPECT_THROW(FfrlsState::make(VectorXd::Zero(2), 1.0, 1.01), Error);
    EXPECT_THROW(FfrlsState::make(VectorXd::Zero(2), -1.0, 1.0), Error);
    const auto s = FfrlsState::make(VectorXd::Ones(3), 5.0, 0.99);
    EXPECT_EQ(s.dim(), 3);
    EXPECT_EQ(s.cov, 5.0 * MatrixXd::Identity(3, 3));
    EXPECT_FALSE(s.windup);
}

TEST(FfrlsStep, ZeroCovarianceLeavesThetaUnchanged)
{
    auto s = FfrlsState::make(VectorXd::Constant(3, 0.7), 0.0, 0.98);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int k = 0; k < 20; ++k) {
        s = ffrls_step(s, {VectorXd::NullaryExpr(3, [&] { return n(rng); }), n(rng)});
        EXPECT_EQ(s.theta, VectorXd::Constant(3, 0.7));
    }
}

TEST(FfrlsStep, DimensionMismatchThrows)
{
    const auto s = FfrlsState::make(VectorXd::Zero(3), 1.0, 1.0);
    try {
        ffrls_step(s, {VectorXd::Zero(2), 0.0});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
}

TEST(FfrlsStep, CorruptCovarianceIsDegenerate)
{
    auto s = FfrlsState::make(VectorXd::Zero(2), 1.0, 1.0);
    s.cov = -10.0 * MatrixXd::Identity(2, 2);
    try {
        ffrls_step(s, {VectorXd::Ones(2), 1.0});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Degenerate);
    }
}

TEST(FfrlsStep, NoiselessDataRecoversTruthAndBatchSolution)
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    const VectorXd truth = (VectorXd(4) << 0.3, -1.2, 2.5, 0.05).finished();
    const double cov0 = 1e8;
    auto s = FfrlsState::make(VectorXd::Zero(4), cov0, 1.0, 1e30);
    std::vector<VectorXd> phis;
    std::vector<double> ys;
    for (int k = 0; k < 40; ++k) {
        VectorXd phi = VectorXd::NullaryExpr(4, [&] { return n(rng); });
        const double y = phi.dot(truth);
        phis.push_back(phi);
        ys.push_back(y);
        s = ffrls_step(s, {phi, y});
    }
    EXPECT_LT((s.theta - truth).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((s.theta - oracle::least_squares(phis, ys)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FfrlsStep, UnitLambdaMatchesIndependentRls)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    auto s = FfrlsState::make(VectorXd::Zero(3), 1.0, 1.0);
    oracle::Rls ref{VectorXd::Zero(3), MatrixXd::Identity(3, 3), 1.0};
    for (int k = 0; k < 300; ++k) {
        VectorXd phi = VectorXd::NullaryExpr(3, [&] { return n(rng); });
        const double y = n(rng);
        s = ffrls_step(s, {phi, y});
        ref.step(phi, y);
        ASSERT_LT((s.theta - ref.theta).cwiseAbs().maxCoeff(), 1e-12) << k;
    }
}

TEST(FfrlsStep, ForgettingMatchesIndependentRls)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    auto s = FfrlsState::make(VectorXd::Zero(2), 10.0, 0.95);
    oracle::Rls ref{VectorXd::Zero(2), 10.0 * MatrixXd::Identity(2, 2), 0.95};
    for (int k = 0; k < 200; ++k) {
        VectorXd phi = VectorXd::NullaryExpr(2, [&] { return n(rng); });
        const double y = 2.0 * phi(0) - phi(1) + 0.1 * n(rng);
        s = ffrls_step(s, {phi, y});
        ref.step(phi, y);
    }
    EXPECT_LT((s.theta - ref.theta).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FfrlsStep, PropertyCovarianceSymmetricPositiveDefinite)
{
    const auto cur = rich_current(2000, 5);
    const auto d = discrete_from_params(TheveninParams{}, 1.0);
    auto s = make_thevenin_ident_state(0.999);
    double ue_prev = 0.0;
    for (std::size_t k = 1; k < cur.size(); ++k) {
        const double ue = d.d0 * cur[k] + d.d1 * cur[k - 1] + d.d2 * ue_prev;
        s = thevenin_ident_step(s, cur[k], cur[k - 1], ue, ue_prev).state;
        ue_prev = ue;
        ASSERT_LT(asym(s.cov), 1e-12);
        ASSERT_GT(Eigen::SelfAdjointEigenSolver<MatrixXd>(s.cov).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(FfrlsStep, PropertyResidualDecaysWithinTenN)
{
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n;
    const VectorXd truth = (VectorXd(3) << 1.0, -0.5, 0.25).finished();
    auto s = FfrlsState::make(VectorXd::Zero(3), 1e6, 0.999);
    double last = 0.0;
    for (int k = 0; k < 30; ++k) {
        VectorXd phi = VectorXd::NullaryExpr(3, [&] { return n(rng); });
        last = phi.dot(truth) - phi.dot(s.theta);
        s = ffrls_step(s, {phi, phi.dot(truth)});
    }
    VectorXd phi = VectorXd::NullaryExpr(3, [&] { return n(rng); });
    EXPECT_LT(std::abs(phi.dot(truth) - phi.dot(s.theta)), 1e-6);
    (void)last;
}

TEST(FfrlsStep, WindupGuardLatchesUnderPoorExcitation)
{
    auto s = make_thevenin_ident_state(0.99);
    const auto d = discrete_from_params(TheveninParams{}, 1.0);
    const double ue = (d.d0 + d.d1) / (1.0 - d.d2);  // settled response to 1 A
    for (int k = 0; k < 3000; ++k) {
        s = thevenin_ident_step(s, 1.0, 1.0, ue, ue).state;
        ASSERT_LE(s.cov.trace(), s.trace_cap * 1.0001);
    }
    EXPECT_TRUE(s.windup);
    EXPECT_GT(s.windup_steps, 0);
}

TEST(FfrlsStep, WindupDoesNotFireOnRichData)
{
    const auto cur = rich_current(3000, 8);
    const auto d = discrete_from_params(TheveninParams{}, 1.0);
    auto s = make_thevenin_ident_state(0.999);
    double ue_prev = 0.0;
    for (std::size_t k = 1; k < cur.size(); ++k) {
        const double ue = d.d0 * cur[k] + d.d1 * cur[k - 1] + d.d2 * ue_prev;
        s = thevenin_ident_step(s, cur[k], cur[k - 1], ue, ue_prev).state;
        ue_prev = ue;
    }
    EXPECT_FALSE(s.windup);
}

TEST(OcvIdent, RintDataConverges)
{
    auto s = make_ocv_ident_state();
    for (int k = 0; k < 50; ++k) {
        const double i = (k % 2 == 0) ? 1.0 : -1.0;
        s = ocv_ident_step(s, i, 3.7 - 0.05 * i).state;
    }
    EXPECT_NEAR(s.theta(0), 3.7, 1e-6);
    EXPECT_NEAR(s.theta(1), 0.05, 1e-6);
}

TEST(OcvIdent, TinyGainKeepsInitialGuess)
{
    const auto s = make_ocv_ident_state(4.0, 1e-3, 1e-9, 0.996);
    const auto r = ocv_ident_step(s, 1.0, 3.6);
    EXPECT_NEAR(r.ocv_estimate, 4.0, 1e-6);
}

TEST(OcvIdent, ZeroCurrentNeverTouchesResistance)
{
    auto s = make_ocv_ident_state(4.0, 0.02);
    for (int k = 0; k < 500; ++k) s = ocv_ident_step(s, 0.0, 3.8 + 0.001 * (k % 3)).state;
    EXPECT_EQ(s.theta(1), 0.02);
}

TEST(OcvIdent, RejectsWrongDimension)
{
    EXPECT_THROW(ocv_ident_step(FfrlsState::make(VectorXd::Zero(3), 1.0, 1.0), 1.0, 3.7), Error);
}

TEST(FitOcvPolynomial, RecoversKnownPolynomial)
{
    std::vector<double> soc, ocv;
    for (int i = 0; i < 200; ++i) {
        soc.push_back(i / 199.0);
        ocv.push_back(oracle::poly(oracle::kRefCoeffs, soc.back()));
    }
    const auto curve = fit_ocv_polynomial(soc, ocv);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(curve.coeffs()[i], oracle::kRefCoeffs[i], 1e-4) << i;
}

TEST(FitOcvPolynomial, ConstantDataGivesConstantCurve)
{
    std::vector<double> soc, ocv;
    for (int i = 0; i < 200; ++i) {
        soc.push_back(i / 199.0);
        ocv.push_back(3.7);
    }
    const auto c = fit_ocv_polynomial(soc, ocv).coeffs();
    EXPECT_NEAR(c[6], 3.7, 1e-6);
    for (int i = 0; i < 6; ++i) EXPECT_LT(std::abs(c[i]), 1e-3) << i;
}

TEST(FitOcvPolynomial, MatchesBatchLeastSquaresOnNoisyData)
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 0.002);
    std::vector<double> soc, ocv;
    std::vector<VectorXd> phis;
    for (int i = 0; i < 400; ++i) {
        const double z = 0.05 + 0.9 * i / 399.0;
        soc.push_back(z);
        ocv.push_back(oracle::poly(oracle::kRefCoeffs, z) + n(rng));
        VectorXd phi(7);
        for (int p = 0; p < 7; ++p) phi(p) = std::pow(z, 6 - p);
        phis.push_back(phi);
    }
    const VectorXd ls = oracle::least_squares(phis, ocv);
    const auto curve = fit_ocv_polynomial(soc, ocv);
    for (int i = 0; i <= 100; ++i) {
        const double z = 0.05 + 0.9 * i / 100.0;
        double v = 0.0;
        for (int p = 0; p < 7; ++p) v += ls(p) * std::pow(z, 6 - p);
        EXPECT_NEAR(curve.eval(z), v, 1e-6) << z;
    }
}

TEST(FitOcvPolynomial, TooFewSamplesIsIllConditioned)
{
    const std::vector<double> soc{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
    const std::vector<double> ocv(6, 3.7);
    try {
        fit_ocv_polynomial(soc, ocv);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IllConditioned);
    }
}

TEST(FitOcvPolynomial, NarrowSocRangeIsIllConditioned)
{
    std::vector<double> soc, ocv;
    for (int i = 0; i < 100; ++i) {
        soc.push_back(0.6 + 0.2 * i / 99.0);
        ocv.push_back(3.9);
    }
    try {
        fit_ocv_polynomial(soc, ocv);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IllConditioned);
    }
}

TEST(FitOcvPolynomial, ConditionGateIsConfigurable)
{
    std::vector<double> soc, ocv;
    for (int i = 0; i < 100; ++i) {
        soc.push_back(0.5 + 0.35 * i / 99.0);
        ocv.push_back(3.9);
    }
    EXPECT_GT(polynomial_condition(soc), 1e12);
    EXPECT_THROW(fit_ocv_polynomial(soc, ocv), Error);
    PolyFitOptions loose;
    loose.max_condition = 1e20;
    EXPECT_NO_THROW(fit_ocv_polynomial(soc, ocv, loose));
}

TEST(FitOcvPolynomial, LengthMismatch)
{
    const std::vector<double> soc(10, 0.5), ocv(9, 3.7);
    try {
        fit_ocv_polynomial(soc, ocv);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
}

TEST(TheveninIdent, BilinearDataRecoversCoefficients)
{
    const auto d = discrete_from_params(TheveninParams{}, 1.0);
    const auto cur = rich_current(201, 10, 10.0);
    auto s = make_thevenin_ident_state(0.999);
    DiscreteCoeffs est;
    double ue_prev = 0.0;
    for (std::size_t k = 1; k < cur.size(); ++k) {
        const double ue = d.d0 * cur[k] + d.d1 * cur[k - 1] + d.d2 * ue_prev;
        auto r = thevenin_ident_step(s, cur[k], cur[k - 1], ue, ue_prev);
        s = std::move(r.state);
        est = r.coeffs;
        ue_prev = ue;
    }
    EXPECT_NEAR(est.d0, 3.08 / 61.0, 1e-6);
    EXPECT_NEAR(est.d1, -2.92 / 61.0, 1e-6);
    EXPECT_NEAR(est.d2, 59.0 / 61.0, 1e-6);
}

TEST(TheveninIdent, ExactDiscretizationConvergesToZohArxCoefficients)
{
    const TheveninParams truth{};
    const BatterySpec spec;
    const auto cur = rich_current(2000, 12);
    EcmState x{0.5, 0.0, false};
    // Ue = OCV - Ut = Up + R0*I, independent of the OCV curve.
    std::vector<double> ue(cur.size());
    for (std::size_t k = 0; k < cur.size(); ++k) {
        x = thevenin_step(x, truth, cur[k], spec);
        ue[k] = x.up_v + truth.r0_ohm * cur[k];
    }
    auto s = make_thevenin_ident_state(0.999);
    DiscreteCoeffs est;
    for (std::size_t k = 1; k < cur.size(); ++k) {
        auto r = thevenin_ident_step(s, cur[k], cur[k - 1], ue[k], ue[k - 1]);
        s = std::move(r.state);
        est = r.coeffs;
    }
    // ZOH data is an exact ARX(1,1) with these coefficients.
    const double a = std::exp(-1.0 / (truth.rp_ohm * truth.cp_f));
    EXPECT_NEAR(est.d0, truth.r0_ohm + truth.rp_ohm * (1.0 - a), 1e-6);
    EXPECT_NEAR(est.d1, -a * truth.r0_ohm, 1e-6);
    EXPECT_NEAR(est.d2, a, 1e-6);

    // Reading them through the bilinear inverse moves Rp*tanh(dt/2tau) from Rp to R0.
    const double th = std::tanh(0.5 / (truth.rp_ohm * truth.cp_f));
    const double tau = 0.5 * (1.0 + a) / (1.0 - a);
    const auto p = params_from_discrete(est, 1.0);
    EXPECT_NEAR(p.r0_ohm, truth.r0_ohm + truth.rp_ohm * th, 1e-6);
    EXPECT_NEAR(p.rp_ohm, truth.rp_ohm * (1.0 - th), 1e-6);
    EXPECT_NEAR(p.cp_f, tau / (truth.rp_ohm * (1.0 - th)), 1e-2);
    EXPECT_LT(oracle::rel_err(p.r0_ohm, truth.r0_ohm), 0.01);
    EXPECT_LT(oracle::rel_err(p.cp_f, truth.cp_f), 0.05);
    // Rp lands 1.67 % low for tau = 30 s at dt = 1 s.
    EXPECT_NEAR(oracle::rel_err(p.rp_ohm, truth.rp_ohm), th, 1e-4);
}
