/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <deque>
#include <string_view>

#include <Eigen/Dense>

#include "socest/model.hpp"

namespace socest {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
/// Measurement Jacobian of the scalar terminal-voltage output, as a row.
using Row2 = Eigen::RowVector2d;

enum class FilterKind { Ekf, Hiekf, Ahiekf, Iahiekf };

inline constexpr FilterKind kAllFilterKinds[] = {FilterKind::Ekf, FilterKind::Hiekf,
                                                 FilterKind::Ahiekf, FilterKind::Iahiekf};

std::string_view to_string(FilterKind kind) noexcept;
/// Upper-case display name ("EKF", "HIEKF", ...).
std::string_view display_name(FilterKind kind) noexcept;
/// Accepts "ekf", "hiekf", "ahiekf", "iahiekf" (case-insensitive).
FilterKind parse_filter_kind(std::string_view name);

struct NoiseConfig {
    Mat2 qx = Mat2{{1e-5, 0.0}, {0.0, 1e-5}};
    double rx = 0.8;
    Mat2 p0 = Mat2{{0.035, 0.0}, {0.0, 0.25}};

    void validate() const;
};

struct HinfConfig {
    Mat2 sx = Mat2{{0.9, 0.0}, {0.0, 0.1}};
    Mat2 lx = Mat2::Identity();
    double gamma = 0.005;

    void validate() const;
};

struct AdaptiveConfig {
    std::size_t window_len = 5;
    double b = 0.96;

    void validate() const;
};

/// Last L voltage residuals.
class ResidualWindow {
public:
    explicit ResidualWindow(std::size_t capacity = 5) : capacity_(capacity) {}

    void push(double residual);
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return values_.empty(); }
    const std::deque<double>& values() const noexcept { return values_; }

private:
    std::size_t capacity_;
    std::deque<double> values_;
};

/// Mean squared residual over the window (all residuals seen so far while
/// fewer than L have arrived). Throws Error(EmptyWindow).
double window_mean(const ResidualWindow& window);

struct FilterState {
    Vec2 x = Vec2(0.8, 0.0);  ///< [SOC, Up]
    Mat2 p = NoiseConfig{}.p0;
    NoiseConfig noise;
    Mat2 sx = HinfConfig{}.sx;  ///< propagated H-infinity weight
    ResidualWindow residuals;
    long step_index = 0;  ///< index of the last completed step, 1-based

    long negative_rx_count = 0;
    long update_failures = 0;
    bool soc_clamped = false;

    static FilterState initial(const Vec2& x0, const NoiseConfig& noise, const HinfConfig& hinf,
                               const AdaptiveConfig& adaptive);
};

struct StepDiagnostics {
    double predicted_v = 0.0;
    double residual_v = 0.0;
    Vec2 gain = Vec2::Zero();
    double qx_trace = 0.0;
    double rx = 0.0;
    double hph = 0.0;  ///< H * P(k|k-1) * H^T
    bool negative_rx = false;
    bool update_failed = false;
};

/// Time update. A and B are rebuilt from params on every call.
FilterState predict(const FilterState& fs, const TheveninParams& params, const BatterySpec& spec,
                    double current_a);

struct Innovation {
    Row2 h;
    double residual = 0.0;
    double predicted_v = 0.0;
};

/// Linearised output at the predicted state: h = [dOCV/dSOC, -1].
Innovation innovate(const FilterState& fs, const TheveninParams& params, const OcvCurve& curve,
                    double current_a, double measured_v);

struct UpdateResult {
    FilterState state;
    Vec2 gain;
};

UpdateResult ekf_update(const FilterState& fs, const Row2& h, double residual);
UpdateResult hinf_update(const FilterState& fs, const Row2& h, double residual,
                         const HinfConfig& hconf);

struct AdaptResult {
    NoiseConfig noise;
    bool negative_rx = false;
};

inline constexpr double kRxFloor = 1e-8;

/// Qx = K M K^T, Rx = M - H P H^T (floored at kRxFloor with a flag).
AdaptResult ahiekf_adapt(const NoiseConfig& noise, const Vec2& gain, const Row2& h,
                         const Mat2& p_prior, double m);

/// d = (1 - b) / (1 - b^k)
double forgetting_weight(long k, double b);

/// Qx = K (d M) K^T, Rx = (1 - d) M + H P H^T.
NoiseConfig iahiekf_adapt(const NoiseConfig& noise, const Vec2& gain, const Row2& h,
                          const Mat2& p_prior, double m, long k, const AdaptiveConfig& aconf);

struct FilterStepResult {
    FilterState state;
    double soc = 0.0;
    StepDiagnostics diag;
};

/// One full sample: predict, innovate, measurement update, then (adaptive
/// kinds) noise adaptation that takes effect from the next step. A singular
/// measurement update is recorded in the diagnostics and the prediction is
/// kept.
FilterStepResult filter_step(FilterKind kind, const FilterState& fs, const TheveninParams& params,
                             const BatterySpec& spec, const OcvCurve& curve,
                             const HinfConfig& hconf, const AdaptiveConfig& aconf,
                             double current_a, double measured_v);

}  // namespace socest
