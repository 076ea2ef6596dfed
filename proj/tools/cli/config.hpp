/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "socest/pipeline.hpp"
#include "socest/sim.hpp"

namespace socest::cli {

/// Bad configuration. `key` names the offending dotted key when there is one.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Unreadable or malformed input file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Settings for offline OCV extraction and polynomial fitting.
struct OcvFitConfig {
    double lambda = 0.996;
    double ocv_init = 4.0;
    double r0_init = 1e-3;
    double cov0 = 1e6;
    double soc_init = 1.0;
    long warmup_steps = 50;
    PolyFitOptions fit;
};

struct AppConfig {
    RunConfig run;
    double ocv_v_lo = 1.0;
    double ocv_v_hi = 5.5;

    TheveninParams sim_params;
    double sim_soc_init = 0.9;
    DriveCycleSpec cycle;
    NoiseSpec noise;

    OcvFitConfig ocvfit;

    void validate() const;
};

/// Parses `key = value` lines ('#' starts a comment). Unknown keys and
/// malformed values throw ConfigError. An empty path yields the defaults.
AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Seven coefficients, one per line, highest power first.
OcvCurve read_ocv_file(const std::filesystem::path& path);
void write_ocv_file(const std::filesystem::path& path, const OcvCurve& curve);

}  // namespace socest::cli
