/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "socest/model.hpp"

namespace socest {

enum class CycleKind { DstLike, FudsLike, ConstantCurrent, Custom };

struct CycleSegment {
    double duration_s = 0.0;
    double current_a = 0.0;
};

struct DriveCycleSpec {
    CycleKind kind = CycleKind::DstLike;
    double duration_s = 3600.0;
    double peak_a = 2.0;
    double repeat_period_s = 360.0;
    std::vector<CycleSegment> segments;  ///< Custom only

    void validate() const;
};

/// Current sequence sampled every dt_s, discharge positive. The sample at
/// index k is the current held over the interval ending at t = (k + 1) * dt.
///
/// DstLike is a 20-step pulse ladder (discharge, rest and regenerative
/// pulses at fixed fractions of peak) stretched to repeat_period_s.
/// FudsLike superposes three square waves with incommensurate periods on a
/// discharge offset, so it changes sign often and has a larger variance than
/// DstLike at the same peak.
std::vector<double> generate_cycle(const DriveCycleSpec& spec, double dt_s);

struct NoiseSpec {
    double v_sigma = 0.0;
    double i_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TruthTrace {
    std::vector<double> time_s;
    std::vector<double> current_a;
    std::vector<double> soc;
    std::vector<double> up_v;
    std::vector<double> ut_v;
    TheveninParams params;
    OcvCurve curve;
    double soc_init = 1.0;
    bool cutoff = false;
    /// Index of the (kept) sample that crossed a voltage limit.
    std::optional<std::size_t> cutoff_index;
    bool soc_clamped = false;

    std::size_t size() const noexcept { return time_s.size(); }
};

struct MeasuredTrace {
    std::vector<double> time_s;
    std::vector<double> current_a;
    std::vector<double> voltage_v;
    std::optional<std::vector<double>> soc_ref;

    std::size_t size() const noexcept { return time_s.size(); }
};

/// Row k holds the state after applying cycle[k] to row k-1 (row -1 is the
/// initial state). The trace stops at, and includes, the first sample whose
/// terminal voltage leaves [v_min, v_max].
TruthTrace simulate_truth(const BatterySpec& spec, const TheveninParams& params,
                          const OcvCurve& curve, const std::vector<double>& cycle,
                          double soc_init);

/// Adds i.i.d. zero-mean Gaussian noise to voltage and current. Voltage and
/// current draw from independent streams derived from the seed.
MeasuredTrace corrupt(const TruthTrace& truth, const NoiseSpec& noise);

}  // namespace socest
