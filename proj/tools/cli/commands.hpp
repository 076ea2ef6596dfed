/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace socest::cli {

/// Process exit codes. These are part of the tool's interface.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitIo = 3,
    kExitExcitation = 4,
    kExitReference = 5,
    kExitMisuse = 6,
};

/// Writes truth.csv and measured.csv under out_dir.
int cmd_simulate(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

/// Rint-based OCV extraction followed by the degree-6 fit; writes the seven
/// coefficients (highest power first) to out_path.
int cmd_fit_ocv(const std::filesystem::path& input_csv, const std::filesystem::path& config_path,
                const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

/// filter is one of ekf, hiekf, ahiekf, iahiekf, all; empty keeps the config's kinds.
int cmd_run(const std::filesystem::path& input_csv, const std::filesystem::path& config_path,
            const std::filesystem::path& out_dir, const std::string& filter, std::ostream& out,
            std::ostream& err);

/// Re-corrupts a truth trace with `seeds` noise seeds (noise.seed + i) and
/// runs the pipeline on each.
int cmd_compare(const std::filesystem::path& input_csv, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, int seeds, const std::string& filter,
                std::ostream& out, std::ostream& err);

/// Applies SOC_EST_LOG (error|warn|info|debug) to the process logger.
void configure_logging();

}  // namespace socest::cli
