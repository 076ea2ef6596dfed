/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "socest/pipeline.hpp"
#include "socest/sim.hpp"

namespace socest::cli {

inline constexpr const char* kMeasuredHeader = "t,current_a,voltage_v";
inline constexpr const char* kMeasuredHeaderRef = "t,current_a,voltage_v,soc_ref";
inline constexpr const char* kTruthHeader = "t,current_a,soc_true,up_true_v,ut_true_v";

enum class CsvSchema { Measured, MeasuredWithRef, Truth };

/// Identifies the schema from the first line. Throws InputError otherwise.
CsvSchema sniff_schema(const std::filesystem::path& path);

/// Reads a sample file, checking that t is strictly increasing and every
/// step is within 1 % of dt_s.
MeasuredTrace read_measured_csv(const std::filesystem::path& path, double dt_s);
TruthTrace read_truth_csv(const std::filesystem::path& path, double dt_s);

void write_measured_csv(const std::filesystem::path& path, const MeasuredTrace& trace);
void write_truth_csv(const std::filesystem::path& path, const TruthTrace& trace);
void write_filter_trace_csv(const std::filesystem::path& path, const RunResult& result,
                            const FilterRun& run);

/// 17 significant digits, so the value reads back bit-identically.
std::string format_double(double v);

}  // namespace socest::cli
