/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace socest::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

double to_double(const std::string& key, std::string_view text)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(key, "config key '" + key + "': expected a number, got '" +
                                   std::string(text) + "'");
    }
    return value;
}

long long to_integer(const std::string& key, std::string_view text)
{
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(key, "config key '" + key + "': expected an integer, got '" +
                                   std::string(text) + "'");
    }
    return value;
}

/// Values separated by commas, whitespace or both.
std::vector<double> to_doubles(const std::string& key, std::string_view text)
{
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        if (part.find_first_of(" \t") == std::string_view::npos) {
            out.push_back(to_double(key, part));
            continue;
        }
        std::size_t pos = 0;
        while ((pos = part.find_first_not_of(" \t", pos)) != std::string_view::npos) {
            const auto end = part.find_first_of(" \t", pos);
            out.push_back(to_double(key, part.substr(pos, end - pos)));
            pos = end;
        }
    }
    return out;
}

/// Two values give a diagonal matrix, four a row-major full matrix.
Mat2 to_mat2(const std::string& key, std::string_view text)
{
    const auto v = to_doubles(key, text);
    if (v.size() == 2) {
        return Mat2{{v[0], 0.0}, {0.0, v[1]}};
    }
    if (v.size() == 4) {
        return Mat2{{v[0], v[1]}, {v[2], v[3]}};
    }
    throw ConfigError(key, "config key '" + key + "': expected 2 (diagonal) or 4 values");
}

std::vector<FilterKind> to_kinds(const std::string& key, std::string_view text)
{
    if (text == "all") {
        return {std::begin(kAllFilterKinds), std::end(kAllFilterKinds)};
    }
    std::vector<FilterKind> kinds;
    for (auto part : split(text, ',')) {
        try {
            kinds.push_back(parse_filter_kind(part));
        } catch (const Error& e) {
            throw ConfigError(key, "config key '" + key + "': " + e.what());
        }
    }
    return kinds;
}

CycleKind to_cycle_kind(const std::string& key, std::string_view text)
{
    if (text == "dst") return CycleKind::DstLike;
    if (text == "fuds") return CycleKind::FudsLike;
    if (text == "constant") return CycleKind::ConstantCurrent;
    if (text == "custom") return CycleKind::Custom;
    throw ConfigError(key, "config key '" + key + "': expected dst, fuds, constant or custom");
}

std::vector<CycleSegment> to_segments(const std::string& key, std::string_view text)
{
    std::vector<CycleSegment> segments;
    for (auto part : split(text, ';')) {
        const auto fields = split(part, ':');
        if (fields.size() != 2) {
            throw ConfigError(key, "config key '" + key +
                                       "': segments are 'duration_s:current_a' separated by ';'");
        }
        segments.push_back({to_double(key, fields[0]), to_double(key, fields[1])});
    }
    return segments;
}

using Setter = std::function<void(AppConfig&, const std::string&, std::string_view,
                                  const std::filesystem::path&)>;

template <typename F>
Setter number(F field)
{
    return [field](AppConfig& c, const std::string& key, std::string_view v,
                   const std::filesystem::path&) { field(c) = to_double(key, v); };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"battery.capacity_as", number([](AppConfig& c) -> double& { return c.run.battery.capacity_as; })},
        {"battery.coulombic_efficiency", number([](AppConfig& c) -> double& { return c.run.battery.coulombic_efficiency; })},
        {"battery.v_max", number([](AppConfig& c) -> double& { return c.run.battery.v_max; })},
        {"battery.v_min", number([](AppConfig& c) -> double& { return c.run.battery.v_min; })},
        {"battery.dt_s", number([](AppConfig& c) -> double& { return c.run.battery.dt_s; })},

        {"ocv.coeffs",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             const auto values = to_doubles(key, v);
             if (values.size() != 7) {
                 throw ConfigError(key, "config key '" + key + "': expected 7 coefficients");
             }
             OcvCurve::Coeffs coeffs{};
             std::copy(values.begin(), values.end(), coeffs.begin());
             c.run.curve = OcvCurve(coeffs);
         }},
        {"ocv.file",
         [](AppConfig& c, const std::string& key, std::string_view v,
            const std::filesystem::path& base) {
             std::filesystem::path p{std::string(v)};
             if (p.is_relative() && !base.empty()) {
                 p = base / p;
             }
             try {
                 c.run.curve = read_ocv_file(p);
             } catch (const InputError& e) {
                 throw ConfigError(key, "config key '" + key + "': " + e.what());
             }
         }},
        {"ocv.v_lo", number([](AppConfig& c) -> double& { return c.ocv_v_lo; })},
        {"ocv.v_hi", number([](AppConfig& c) -> double& { return c.ocv_v_hi; })},

        {"params.r0_ohm", number([](AppConfig& c) -> double& { return c.run.initial_params.r0_ohm; })},
        {"params.rp_ohm", number([](AppConfig& c) -> double& { return c.run.initial_params.rp_ohm; })},
        {"params.cp_f", number([](AppConfig& c) -> double& { return c.run.initial_params.cp_f; })},

        {"filter.kinds",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.run.kinds = to_kinds(key, v);
         }},
        {"filter.soc_init", number([](AppConfig& c) -> double& { return c.run.soc_init_estimator; })},
        {"filter.up_init", number([](AppConfig& c) -> double& { return c.run.up_init_estimator; })},
        {"filter.rx", number([](AppConfig& c) -> double& { return c.run.noise.rx; })},
        {"filter.qx",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.run.noise.qx = to_mat2(key, v);
         }},
        {"filter.p0",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.run.noise.p0 = to_mat2(key, v);
         }},

        {"hinf.sx",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.run.hinf.sx = to_mat2(key, v);
         }},
        {"hinf.lx",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.run.hinf.lx = to_mat2(key, v);
         }},
        {"hinf.gamma", number([](AppConfig& c) -> double& { return c.run.hinf.gamma; })},

        {"adaptive.window_len",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             const auto n = to_integer(key, v);
             if (n < 1) {
                 throw ConfigError(key, "config key '" + key + "': window length must be >= 1");
             }
             c.run.adaptive.window_len = static_cast<std::size_t>(n);
         }},
        {"adaptive.b", number([](AppConfig& c) -> double& { return c.run.adaptive.b; })},

        {"ident.lambda", number([](AppConfig& c) -> double& { return c.run.ident_lambda; })},
        {"ident.warmup_steps",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.run.ident_warmup_steps = static_cast<long>(to_integer(key, v));
         }},
        {"ident.cov0", number([](AppConfig& c) -> double& { return c.run.ident_cov0; })},
        {"ident.theta0",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             const auto t = to_doubles(key, v);
             if (t.size() != 3) {
                 throw ConfigError(key, "config key '" + key + "': expected d0,d1,d2");
             }
             c.run.ident_theta0 = {t[0], t[1], t[2]};
         }},
        {"ident.trace_cap", number([](AppConfig& c) -> double& { return c.run.ident_trace_cap; })},

        {"reference.mode",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             try {
                 c.run.reference_mode = parse_reference_mode(v);
             } catch (const Error&) {
                 throw ConfigError(key, "config key '" + key +
                                            "': expected sim_truth, provided or coulomb");
             }
         }},
        {"reference.soc_init", number([](AppConfig& c) -> double& { return c.run.reference_soc_init; })},

        {"sim.r0_ohm", number([](AppConfig& c) -> double& { return c.sim_params.r0_ohm; })},
        {"sim.rp_ohm", number([](AppConfig& c) -> double& { return c.sim_params.rp_ohm; })},
        {"sim.cp_f", number([](AppConfig& c) -> double& { return c.sim_params.cp_f; })},
        {"sim.soc_init", number([](AppConfig& c) -> double& { return c.sim_soc_init; })},

        {"cycle.kind",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.cycle.kind = to_cycle_kind(key, v);
         }},
        {"cycle.duration_s", number([](AppConfig& c) -> double& { return c.cycle.duration_s; })},
        {"cycle.peak_a", number([](AppConfig& c) -> double& { return c.cycle.peak_a; })},
        {"cycle.repeat_period_s", number([](AppConfig& c) -> double& { return c.cycle.repeat_period_s; })},
        {"cycle.segments",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.cycle.segments = to_segments(key, v);
         }},

        {"noise.v_sigma", number([](AppConfig& c) -> double& { return c.noise.v_sigma; })},
        {"noise.i_sigma", number([](AppConfig& c) -> double& { return c.noise.i_sigma; })},
        {"noise.seed",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             std::uint64_t seed = 0;
             const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
             if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
                 throw ConfigError(key, "config key '" + key + "': expected an unsigned integer");
             }
             c.noise.seed = seed;
         }},

        {"ocvfit.lambda", number([](AppConfig& c) -> double& { return c.ocvfit.lambda; })},
        {"ocvfit.ocv_init", number([](AppConfig& c) -> double& { return c.ocvfit.ocv_init; })},
        {"ocvfit.r0_init", number([](AppConfig& c) -> double& { return c.ocvfit.r0_init; })},
        {"ocvfit.cov0", number([](AppConfig& c) -> double& { return c.ocvfit.cov0; })},
        {"ocvfit.soc_init", number([](AppConfig& c) -> double& { return c.ocvfit.soc_init; })},
        {"ocvfit.warmup_steps",
         [](AppConfig& c, const std::string& key, std::string_view v, const std::filesystem::path&) {
             c.ocvfit.warmup_steps = static_cast<long>(to_integer(key, v));
         }},
        {"ocvfit.fit_lambda", number([](AppConfig& c) -> double& { return c.ocvfit.fit.lambda; })},
        {"ocvfit.fit_cov0", number([](AppConfig& c) -> double& { return c.ocvfit.fit.cov_scale; })},
        {"ocvfit.min_soc_range", number([](AppConfig& c) -> double& { return c.ocvfit.fit.min_soc_range; })},
        {"ocvfit.max_condition", number([](AppConfig& c) -> double& { return c.ocvfit.fit.max_condition; })},
    };
    return table;
}

template <typename Fn>
void checked(const char* key, Fn&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        throw ConfigError(key, std::string("invalid configuration (") + key + "): " + e.what());
    }
}

}  // namespace

void AppConfig::validate() const
{
    checked("battery", [&] { run.battery.validate(); });
    checked("ocv", [&] { run.curve.validate(ocv_v_lo, ocv_v_hi); });
    checked("params", [&] { run.initial_params.validate(); });
    checked("filter", [&] { run.noise.validate(); });
    checked("hinf", [&] { run.hinf.validate(); });
    checked("adaptive", [&] { run.adaptive.validate(); });
    checked("ident", [&] {
        RunConfig probe = run;
        probe.curve = OcvCurve::reference_nmc();
        probe.validate();
    });
    checked("sim", [&] {
        sim_params.validate();
        if (!(sim_soc_init >= 0.0 && sim_soc_init <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "sim.soc_init must lie in [0, 1]");
        }
    });
    checked("cycle", [&] { cycle.validate(); });
    checked("noise", [&] { noise.validate(); });
    checked("ocvfit", [&] {
        if (!(ocvfit.lambda > 0.0 && ocvfit.lambda <= 1.0) ||
            !(ocvfit.fit.lambda > 0.0 && ocvfit.fit.lambda <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "forgetting factors must lie in (0, 1]");
        }
        if (!(ocvfit.soc_init >= 0.0 && ocvfit.soc_init <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "ocvfit.soc_init must lie in [0, 1]");
        }
        if (ocvfit.warmup_steps < 0 || !(ocvfit.cov0 > 0.0) || !(ocvfit.fit.cov_scale > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "warmup and covariances must be positive");
        }
    });
}

AppConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    AppConfig config;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line =
            text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", "config line " + std::to_string(line_no) +
                                      ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) {
            throw ConfigError(key, "unknown config key '" + key + "' (line " +
                                       std::to_string(line_no) + ")");
        }
        it->second(config, key, value, base_dir);
    }
    config.validate();
    return config;
}

AppConfig load_config(const std::filesystem::path& path)
{
    if (path.empty()) {
        AppConfig config;
        config.validate();
        return config;
    }
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

OcvCurve read_ocv_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open OCV coefficient file " + path.string());
    }
    OcvCurve::Coeffs coeffs{};
    std::size_t count = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        if (count == coeffs.size()) {
            throw InputError(path.string() + ": more than 7 coefficients");
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw InputError(path.string() + ": malformed coefficient '" + std::string(t) + "'");
        }
        coeffs[count++] = v;
    }
    if (count != coeffs.size()) {
        throw InputError(path.string() + ": expected 7 coefficients, found " +
                         std::to_string(count));
    }
    return OcvCurve(coeffs);
}

void write_ocv_file(const std::filesystem::path& path, const OcvCurve& curve)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    char buf[64];
    for (double k : curve.coeffs()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", k);
        out << buf;
    }
    if (!out) {
        throw InputError("failed writing " + path.string());
    }
}

}  // namespace socest::cli
