// SPDX-License-Identifier: Apache-2.0
//
// cbfsched - coordinated beamforming and user selection for multicell MISO
// Copyright (C) 2026 The cbfsched authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


// cbfsim: command-line front end.
//
//   cbfsim run           Monte Carlo sum-rate sweep, CSV out
//   cbfsim validate      distributional checks of the analytic results
//   cbfsim dump-channels channel realisations of the first trials, CSV out
//
// Exit status: 0 success, 1 runtime error or failed check, 2 bad usage/config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbf/cbf.hpp"

namespace
{

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Writes to --out, or stdout when it is empty.
template <class F> void emit(const std::string &path, F &&write)
{
    if (path.empty())
    {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw cbf::Error("cannot open output file '" + path + "'");
    write(out);
    if (!out)
        throw cbf::Error("write failed on '" + path + "'");
}

std::string join(const std::vector<std::string> &v)
{
    std::string s;
    for (const auto &x : v)
        s += (s.empty() ? "" : ",") + x;
    return s;
}

struct SweepOptions
{
    std::string config;
    std::optional<std::string> b, nt, k, k_grid, trials, seed, precoder, workers;
    std::vector<std::string> rho_db, strategies;
    std::string out;

    void attach(CLI::App *app, bool sweep)
    {
        app->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
        app->add_option("--b", b, "number of base stations B");
        app->add_option("--nt", nt, "antennas per base station Nt");
        app->add_option("--k", k, "cell-edge users per base station K");
        app->add_option("--seed", seed, "master seed");
        app->add_option("--out", out, "output CSV (default stdout)");
        if (sweep)
        {
            app->add_option("--k-grid", k_grid, "comma-separated K values");
            app->add_option("--rho-db", rho_db, "SNR grid in dB")->delimiter(',');
            app->add_option("--trials", trials, "Monte Carlo trials per grid point");
            app->add_option("--precoder", precoder, "DZF or DVSINR");
            app->add_option("--strategies", strategies, "comma-separated strategy list")->delimiter(',');
            app->add_option("--workers", workers, "worker threads");
        }
        else
            app->add_option("--trials", trials, "number of trials to dump");
    }

    // Config file first, then flags on top.
    cbf::ExperimentConfig resolve() const
    {
        cbf::ExperimentConfig cfg = config.empty() ? cbf::ExperimentConfig{} : cbf::load_config(config);
        const auto set = [&](const char *key, const std::optional<std::string> &v) {
            if (v)
                cbf::apply_setting(cfg, key, *v);
        };
        set("B", b);
        set("Nt", nt);
        set("K", k);
        set("K_grid", k_grid);
        set("trials", trials);
        set("seed", seed);
        set("precoder", precoder);
        set("workers", workers);
        if (!rho_db.empty())
            cbf::apply_setting(cfg, "rho_db_grid", join(rho_db));
        if (!strategies.empty())
            cbf::apply_setting(cfg, "strategies", join(strategies));
        return cfg;
    }
};

int cmd_run(const SweepOptions &opt)
{
    const cbf::ExperimentConfig cfg = opt.resolve();
    cfg.validate();
    const auto rows = cbf::run_sweep(cfg);
    emit(opt.out, [&](std::ostream &os) { cbf::write_results_csv(os, rows); });
    return 0;
}

int cmd_dump(const SweepOptions &opt)
{
    cbf::ExperimentConfig cfg = opt.resolve();
    if (!opt.trials)
        cfg.trials = 1;
    cfg.net.validate();
    if (cfg.trials < 1)
        throw cbf::ConfigError("trials must be at least 1");
    emit(opt.out, [&](std::ostream &os) {
        cbf::write_channel_csv_header(os);
        for (std::size_t t = 0; t < cfg.trials; ++t)
            cbf::write_channel_csv(os, t, cbf::deploy(cfg.net, cbf::stream_seed(cfg.seed, t)));
    });
    return 0;
}

struct ValidateOptions
{
    std::string prop;
    std::size_t nt = 3;
    std::size_t b = 3;
    std::size_t samples = 20000;
    std::uint64_t seed = 7;
    std::vector<double> rho_db{-90, -20, -10, 0, 10, 20, 30, 40, 50, 80};
    std::string out;
};

int cmd_validate(const ValidateOptions &opt)
{
    if (opt.samples < 1)
        throw cbf::ConfigError("samples must be at least 1");
    std::vector<double> rho;
    for (double db : opt.rho_db)
        rho.push_back(cbf::db_to_linear(db));

    cbf::PropositionReport rep;
    if (opt.prop == "1")
        rep = cbf::check_prop1(opt.nt, opt.b, opt.samples, opt.seed);
    else if (opt.prop == "2" || opt.prop == "3")
        rep = cbf::check_prop2_prop3(opt.nt, opt.b, rho, opt.samples, opt.seed);
    else if (opt.prop == "4")
        rep = cbf::check_prop4_leakage(opt.nt, opt.b, rho, opt.samples, opt.seed);
    else if (opt.prop == "5" || opt.prop == "alpha")
        rep = cbf::check_alpha_heuristic(opt.nt, opt.b, rho, opt.samples, opt.seed);
    else if (opt.prop == "6")
        rep = cbf::check_prop6_nspa(opt.nt, opt.b, opt.samples, opt.seed);
    else
        throw cbf::ConfigError("unknown proposition '" + opt.prop + "' (expected 1, 2, 3, 4, 5, alpha or 6)");

    emit(opt.out, [&](std::ostream &os) {
        cbf::write_report_csv_header(os);
        cbf::write_report_csv(os, rep);
    });
    for (const auto &f : rep.failures)
        std::cerr << "FAIL " << f << '\n';
    std::cerr << (rep.passed() ? "PASS " : "FAIL ") << rep.id << " Nt=" << rep.num_antennas << " B=" << rep.num_bs
              << " samples=" << rep.samples << '\n';
    return rep.passed() ? 0 : kExitRuntime;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Coordinated beamforming and user selection simulator"};
    app.require_subcommand(1);

    SweepOptions run_opt;
    auto *run = app.add_subcommand("run", "Monte Carlo sum-rate sweep");
    run_opt.attach(run, true);

    ValidateOptions val_opt;
    auto *val = app.add_subcommand("validate", "check an analytic result by simulation");
    val->add_option("--prop", val_opt.prop, "1, 2, 3, 4, 5 (alpha) or 6")->required();
    val->add_option("--nt", val_opt.nt, "antennas per base station");
    val->add_option("--b", val_opt.b, "number of base stations");
    val->add_option("--samples", val_opt.samples, "Monte Carlo samples");
    val->add_option("--seed", val_opt.seed, "master seed");
    val->add_option("--rho-db", val_opt.rho_db, "SNR grid in dB")->delimiter(',');
    val->add_option("--out", val_opt.out, "output CSV (default stdout)");

    SweepOptions dump_opt;
    auto *dump = app.add_subcommand("dump-channels", "write channel realisations");
    dump_opt.attach(dump, false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }

    try
    {
        if (*run)
            return cmd_run(run_opt);
        if (*val)
            return cmd_validate(val_opt);
        return cmd_dump(dump_opt);
    }
    catch (const cbf::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
