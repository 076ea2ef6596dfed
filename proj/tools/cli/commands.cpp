/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>
#include <vector>

#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "config.hpp"
#include "csv_io.hpp"
#include "socest/ident.hpp"
#include "socest/pipeline.hpp"
#include "socest/sim.hpp"

namespace socest::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn)
{
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InputError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        switch (e.kind()) {
        case ErrorKind::MissingReferenceSource:
            err << "reference error: " << e.what() << '\n';
            return kExitReference;
        case ErrorKind::IllConditioned:
            err << "excitation error: " << e.what() << '\n';
            return kExitExcitation;
        case ErrorKind::InvalidArgument:
            err << "config error: " << e.what() << '\n';
            return kExitConfig;
        case ErrorKind::EmptyInput:
        case ErrorKind::LengthMismatch:
            err << "i/o error: " << e.what() << '\n';
            return kExitIo;
        default:
            err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
            return 1;
        }
    }
}

void ensure_dir(const fs::path& dir)
{
    if (!dir.empty()) {
        fs::create_directories(dir);
    }
}

std::vector<FilterKind> resolve_filter(const std::string& filter,
                                       const std::vector<FilterKind>& configured)
{
    if (filter.empty()) {
        return configured;
    }
    if (filter == "all") {
        return {std::begin(kAllFilterKinds), std::end(kAllFilterKinds)};
    }
    try {
        return {parse_filter_kind(filter)};
    } catch (const Error& e) {
        throw ConfigError("--filter", e.what());
    }
}

json summary_json(const RunConfig& config, const RunResult& result)
{
    json j;
    j["steps"] = result.steps();
    j["reference_mode"] = std::string(to_string(config.reference_mode));
    j["cutoff_events"] = result.cutoff_events;
    json filters = json::array();
    for (const auto& f : result.filters) {
        json e;
        e["name"] = std::string(display_name(f.kind));
        e["rmse_pct"] = f.rmse_pct;
        e["mae_pct"] = f.mae_pct;
        e["negative_rx"] = f.negative_rx;
        e["nonphysical_params"] = f.nonphysical_params;
        e["ident_windup_steps"] = f.ident_windup_steps;
        e["update_failures"] = f.update_failures;
        e["soc_clamped"] = f.soc_clamped;
        filters.push_back(std::move(e));
    }
    j["filters"] = std::move(filters);
    return j;
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw InputError("failed writing " + path.string());
    }
}

struct TableRow {
    std::string name;
    double rmse;
    double mae;
};

void print_table(std::ostream& out, std::vector<TableRow> rows)
{
    std::stable_sort(rows.begin(), rows.end(),
                     [](const TableRow& a, const TableRow& b) { return a.rmse < b.rmse; });
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-10s %10s %10s\n", "Method", "RMSE/%", "MAE/%");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-10s %10.4f %10.4f\n", r.name.c_str(), r.rmse, r.mae);
        out << buf;
    }
}

std::vector<TableRow> table_rows(const RunResult& result)
{
    std::vector<TableRow> rows;
    for (const auto& f : result.filters) {
        rows.push_back({std::string(display_name(f.kind)), f.rmse_pct, f.mae_pct});
    }
    return rows;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void configure_logging()
{
    auto logger = spdlog::stderr_logger_mt("socest");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("SOC_EST_LOG")) {
        const std::string v(env);
        if (v == "error") level = spdlog::level::err;
        else if (v == "warn") level = spdlog::level::warn;
        else if (v == "info") level = spdlog::level::info;
        else if (v == "debug") level = spdlog::level::debug;
    }
    spdlog::set_level(level);
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        AppConfig config = load_config(config_path);
        if (seed) {
            config.noise.seed = *seed;
        }
        const auto cycle = generate_cycle(config.cycle, config.run.battery.dt_s);
        spdlog::info("simulating {} samples", cycle.size());
        const TruthTrace truth = simulate_truth(config.run.battery, config.sim_params,
                                                config.run.curve, cycle, config.sim_soc_init);
        const MeasuredTrace measured = corrupt(truth, config.noise);

        ensure_dir(out_dir);
        write_truth_csv(out_dir / "truth.csv", truth);
        write_measured_csv(out_dir / "measured.csv", measured);

        out << "simulated " << truth.size() << " steps, final SOC "
            << (truth.size() ? format_double(truth.soc.back()) : std::string("n/a"))
            << ", cutoff events " << (truth.cutoff ? 1 : 0) << '\n';
        return kExitOk;
    });
}

int cmd_fit_ocv(const fs::path& input_csv, const fs::path& config_path, const fs::path& out_path,
                std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        const AppConfig config = load_config(config_path);
        const MeasuredTrace samples = read_measured_csv(input_csv, config.run.battery.dt_s);
        const OcvFitConfig& fit = config.ocvfit;

        const auto [lo, hi] =
            std::minmax_element(samples.current_a.begin(), samples.current_a.end());
        if (*lo == *hi) {
            throw Error(ErrorKind::IllConditioned,
                        "current never changes, so OCV and R0 cannot be separated");
        }

        FfrlsState ident = make_ocv_ident_state(fit.ocv_init, fit.r0_init, fit.cov0, fit.lambda);
        std::vector<double> soc_hist;
        soc_hist.reserve(samples.size());
        std::vector<double> soc;
        std::vector<double> ocv;
        double z = fit.soc_init;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            z = coulomb_step(z, samples.current_a[k], config.run.battery).soc;
            soc_hist.push_back(z);
            auto res = ocv_ident_step(ident, samples.current_a[k], samples.voltage_v[k]);
            ident = std::move(res.state);
            if (static_cast<long>(k) < fit.warmup_steps) {
                continue;
            }
            // The forgetting window reports OCV as of its weighted centre, not of sample k.
            const double back = ffrls_centroid(static_cast<long>(k) + 1, fit.lambda);
            const double pos = static_cast<double>(k) - back;
            const auto lo_i = static_cast<std::size_t>(std::floor(pos));
            const double frac = pos - static_cast<double>(lo_i);
            const double z_at = lo_i + 1 < soc_hist.size()
                                    ? soc_hist[lo_i] + frac * (soc_hist[lo_i + 1] - soc_hist[lo_i])
                                    : soc_hist[lo_i];
            soc.push_back(z_at);
            ocv.push_back(res.ocv_estimate);
        }
        spdlog::info("identified R0 = {} ohm from {} samples", ident.theta[1], samples.size());

        const OcvCurve curve = fit_ocv_polynomial(soc, ocv, fit.fit);
        try {
            curve.validate(config.ocv_v_lo, config.ocv_v_hi);
        } catch (const Error& e) {
            spdlog::warn("fitted curve fails the sanity gate: {}", e.what());
        }
        if (out_path.has_parent_path()) {
            ensure_dir(out_path.parent_path());
        }
        write_ocv_file(out_path, curve);
        for (double k : curve.coeffs()) {
            out << format_double(k) << '\n';
        }
        return kExitOk;
    });
}

int cmd_run(const fs::path& input_csv, const fs::path& config_path, const fs::path& out_dir,
            const std::string& filter, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        AppConfig config = load_config(config_path);
        config.run.kinds = resolve_filter(filter, config.run.kinds);
        const MeasuredTrace samples = read_measured_csv(input_csv, config.run.battery.dt_s);

        const RunResult result = run_joint(config.run, samples);
        ensure_dir(out_dir);
        for (const auto& f : result.filters) {
            write_filter_trace_csv(out_dir / ("trace_" + std::string(to_string(f.kind)) + ".csv"),
                                   result, f);
        }
        write_json(out_dir / "summary.json", summary_json(config.run, result));
        print_table(out, table_rows(result));
        return kExitOk;
    });
}

int cmd_compare(const fs::path& input_csv, const fs::path& config_path, const fs::path& out_dir,
                int seeds, const std::string& filter, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> int {
        if (seeds < 1) {
            err << "usage error: --seeds must be at least 1\n";
            return static_cast<int>(kExitMisuse);
        }
        AppConfig config = load_config(config_path);
        config.run.kinds = resolve_filter(filter, config.run.kinds);
        if (sniff_schema(input_csv) != CsvSchema::Truth) {
            err << "usage error: compare needs a simulated truth trace (" << kTruthHeader
                << "); reseeding noise on a measured trace is meaningless\n";
            return static_cast<int>(kExitMisuse);
        }
        const TruthTrace truth = read_truth_csv(input_csv, config.run.battery.dt_s);

        auto run_seed = [&](int i) {
            NoiseSpec noise = config.noise;
            noise.seed = config.noise.seed + static_cast<std::uint64_t>(i);
            return run_joint(config.run, corrupt(truth, noise));
        };

        std::vector<RunResult> results(static_cast<std::size_t>(seeds));
        const int workers =
            std::max(1, std::min<int>(seeds, static_cast<int>(std::thread::hardware_concurrency())));
        for (int base = 0; base < seeds; base += workers) {
            std::vector<std::future<RunResult>> batch;
            for (int i = base; i < std::min(seeds, base + workers); ++i) {
                batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                           run_seed, i));
            }
            for (int i = base; i < std::min(seeds, base + workers); ++i) {
                results[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - base)].get();
            }
        }

        ensure_dir(out_dir);
        for (int i = 0; i < seeds; ++i) {
            const fs::path dir = out_dir / ("seed_" + std::to_string(i));
            ensure_dir(dir);
            write_json(dir / "summary.json",
                       summary_json(config.run, results[static_cast<std::size_t>(i)]));
        }

        json med;
        med["seeds"] = seeds;
        med["master_seed"] = config.noise.seed;
        json filters = json::array();
        std::vector<TableRow> rows;
        for (std::size_t f = 0; f < config.run.kinds.size(); ++f) {
            std::vector<double> rmse;
            std::vector<double> mae;
            long negative_rx = 0;
            for (const auto& r : results) {
                rmse.push_back(r.filters[f].rmse_pct);
                mae.push_back(r.filters[f].mae_pct);
                negative_rx += r.filters[f].negative_rx;
            }
            const std::string name(display_name(config.run.kinds[f]));
            json e;
            e["name"] = name;
            e["median_rmse_pct"] = median(rmse);
            e["median_mae_pct"] = median(mae);
            e["total_negative_rx"] = negative_rx;
            filters.push_back(std::move(e));
            rows.push_back({name, median(rmse), median(mae)});
        }
        med["filters"] = std::move(filters);
        write_json(out_dir / "median_summary.json", med);

        out << "median over " << seeds << " seed(s)\n";
        print_table(out, rows);
        return kExitOk;
    });
}

}  // namespace socest::cli
