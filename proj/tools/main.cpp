/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv)
{
    namespace cli = socest::cli;
    cli::configure_logging();

    CLI::App app{"Battery SOC estimation with online Thevenin identification"};
    app.require_subcommand(1);

    std::string config;
    std::string input;
    std::string out_dir;
    std::string out_path;
    std::string filter;
    std::optional<std::uint64_t> seed;
    int seeds = 10;

    auto* sim = app.add_subcommand("simulate", "Generate truth.csv and measured.csv");
    sim->add_option("-c,--config", config, "Config file (defaults if omitted)");
    sim->add_option("-o,--out", out_dir, "Output directory")->required();
    sim->add_option("--seed", seed, "Override noise.seed");

    auto* fit = app.add_subcommand("fit-ocv", "Identify OCV from a Rint fit and fit the polynomial");
    fit->add_option("input", input, "Sample CSV (t,current_a,voltage_v[,soc_ref])")->required();
    fit->add_option("-c,--config", config, "Config file");
    fit->add_option("-o,--out", out_path, "Coefficient file to write")->required();

    auto* run = app.add_subcommand("run", "Run the joint estimator on a sample CSV");
    run->add_option("input", input, "Sample CSV")->required();
    run->add_option("-c,--config", config, "Config file");
    run->add_option("-o,--out", out_dir, "Output directory")->required();
    run->add_option("--filter", filter, "ekf|hiekf|ahiekf|iahiekf|all")
        ->check(CLI::IsMember({"ekf", "hiekf", "ahiekf", "iahiekf", "all"}));

    auto* cmp = app.add_subcommand("compare", "Re-run a simulated truth trace over noise seeds");
    cmp->add_option("input", input, "truth.csv from 'simulate'")->required();
    cmp->add_option("-c,--config", config, "Config file");
    cmp->add_option("-o,--out", out_dir, "Output directory")->required();
    cmp->add_option("--seeds", seeds, "Number of noise seeds");
    cmp->add_option("--filter", filter, "ekf|hiekf|ahiekf|iahiekf|all")
        ->check(CLI::IsMember({"ekf", "hiekf", "ahiekf", "iahiekf", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitMisuse;
    }

    if (*sim) {
        return cli::cmd_simulate(config, out_dir, seed, std::cout, std::cerr);
    }
    if (*fit) {
        return cli::cmd_fit_ocv(input, config, out_path, std::cout, std::cerr);
    }
    if (*run) {
        return cli::cmd_run(input, config, out_dir, filter, std::cout, std::cerr);
    }
    return cli::cmd_compare(input, config, out_dir, seeds, filter, std::cout, std::cerr);
}
