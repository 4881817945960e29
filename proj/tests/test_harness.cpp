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


#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cbf/harness.hpp"

using namespace cbf;

namespace
{

ExperimentConfig parse(const std::string &text)
{
    std::istringstream is(text);
    return parse_config(is);
}

std::string csv(const std::vector<ResultRow> &rows)
{
    std::ostringstream os;
    write_results_csv(os, rows);
    return os.str();
}

std::string config_error(const ExperimentConfig &cfg)
{
    try
    {
        cfg.validate();
    }
    catch (const ConfigError &e)
    {
        return e.what();
    }
    return "";
}

ExperimentConfig small(PrecoderKind kind, std::size_t nt)
{
    ExperimentConfig cfg;
    cfg.net.num_antennas = nt;
    cfg.net.users_per_bs = 4;
    cfg.precoder = kind;
    cfg.trials = 40;
    cfg.seed = 99;
    cfg.rho_db_grid = {0.0, 10.0};
    if (nt >= cfg.net.num_bs)
        cfg.strategies = {Strategy::OGCSI, Strategy::OMUS,  Strategy::RMUS,
                          Strategy::ONSPA, Strategy::RNSPA, Strategy::MAXSNR};
    else
        cfg.strategies = {Strategy::OGCSI, Strategy::OMUS2, Strategy::RMUS2,
                          Strategy::ONSPA, Strategy::RNSPA, Strategy::MAXSNR};
    return cfg;
}

} // namespace

TEST(Config, ParsesKeysCommentsAndLists)
{
    const auto cfg = parse("# comment\n"
                           "B = 4\n"
                           "nt=5   # trailing\n"
                           "\n"
                           "K_grid = 2, 4 ,6\n"
                           "rho_db_grid = -10, 0.5, 20\n"
                           "TRIALS = 17\n"
                           "seed = 18446744073709551615\n"
                           "precoder = DVSINR\n"
                           "strategies = O-GCSI, R-NSPA\n"
                           "r = 900\n"
                           "r_coop = 250\n"
                           "workers = 3\n");
    EXPECT_EQ(cfg.net.num_bs, 4u);
    EXPECT_EQ(cfg.net.num_antennas, 5u);
    EXPECT_EQ(cfg.k_grid, (std::vector<std::size_t>{2, 4, 6}));
    EXPECT_EQ(cfg.rho_db_grid, (std::vector<double>{-10.0, 0.5, 20.0}));
    EXPECT_EQ(cfg.trials, 17u);
    EXPECT_EQ(cfg.seed, 18446744073709551615ULL);
    EXPECT_EQ(cfg.precoder, PrecoderKind::DVSINR);
    EXPECT_EQ(cfg.strategies, (std::vector<Strategy>{Strategy::OGCSI, Strategy::RNSPA}));
    EXPECT_DOUBLE_EQ(cfg.net.cell_radius, 900.0);
    EXPECT_DOUBLE_EQ(cfg.net.coop_radius, 250.0);
    EXPECT_EQ(cfg.workers, 3u);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, Defaults)
{
    const ExperimentConfig cfg;
    EXPECT_EQ(cfg.trials, 2000u);
    EXPECT_EQ(cfg.net.num_bs, 3u);
    EXPECT_EQ(cfg.net.users_per_bs, 10u);
    EXPECT_DOUBLE_EQ(cfg.net.cell_radius, 1000.0);
    EXPECT_DOUBLE_EQ(cfg.net.coop_radius, 300.0);
}

TEST(Config, MalformedInputRejected)
{
    EXPECT_THROW(parse("B 3\n"), ConfigError);
    EXPECT_THROW(parse("colour = red\n"), ConfigError);
    EXPECT_THROW(parse("B = three\n"), ConfigError);
    EXPECT_THROW(parse("B = -3\n"), ConfigError);
    EXPECT_THROW(parse("rho_db_grid = 1, x\n"), ConfigError);
    EXPECT_THROW(parse("rho_db_grid = \n"), ConfigError);
    EXPECT_THROW(parse("strategies = O-GCSI, BEST\n"), ConfigError);
    EXPECT_THROW(parse("precoder = MMSE\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST(Config, InvariantsCheckedBeforeWork)
{
    ExperimentConfig cfg;
    cfg.net.num_antennas = 2;
    EXPECT_EQ(config_error(cfg), "DZF undefined for Nt < B");

    cfg.precoder = PrecoderKind::DVSINR;
    cfg.strategies = {Strategy::OMUS};
    EXPECT_NE(config_error(cfg).find("requires Nt >= B"), std::string::npos);
    cfg.strategies = {Strategy::OMUS2, Strategy::ONSPA};
    EXPECT_EQ(config_error(cfg), "");

    cfg.net.num_antennas = 3;
    EXPECT_NE(config_error(cfg).find("requires Nt < B"), std::string::npos);

    cfg.strategies = {Strategy::OGCSI, Strategy::OGCSI};
    EXPECT_EQ(config_error(cfg), "duplicate strategy");
    cfg.strategies = {Strategy::OGCSI};
    cfg.trials = 0;
    EXPECT_EQ(config_error(cfg), "trials must be at least 1");
    cfg.trials = 1;
    cfg.rho_db_grid.clear();
    EXPECT_NE(config_error(cfg), "");
    EXPECT_THROW(run_sweep(cfg), ConfigError);
}

TEST(Sweep, SingleUserEveryStrategyAgrees)
{
    ExperimentConfig cfg = small(PrecoderKind::DZF, 3);
    cfg.net.users_per_bs = 1;
    cfg.trials = 1;
    const auto rows = run_sweep(cfg);
    ASSERT_EQ(rows.size(), cfg.rho_db_grid.size() * cfg.strategies.size());
    for (const auto &r : rows)
    {
        const auto &first = rows[(&r - rows.data()) / cfg.strategies.size() * cfg.strategies.size()];
        EXPECT_EQ(r.mean_sum_rate, first.mean_sum_rate);
        EXPECT_EQ(r.std_error, 0.0);
    }
}

TEST(Sweep, RowOrderAndFields)
{
    ExperimentConfig cfg = small(PrecoderKind::DVSINR, 3);
    cfg.k_grid = {2, 3};
    cfg.trials = 5;
    const auto rows = run_sweep(cfg);
    ASSERT_EQ(rows.size(), 2 * 2 * 6u);
    EXPECT_EQ(rows[0].users_per_bs, 2u);
    EXPECT_EQ(rows[0].rho_db, 0.0);
    EXPECT_EQ(rows[0].strategy, Strategy::OGCSI);
    EXPECT_EQ(rows[1].strategy, Strategy::OMUS);
    EXPECT_EQ(rows[6].rho_db, 10.0);
    EXPECT_EQ(rows[12].users_per_bs, 3u);
    for (const auto &r : rows)
    {
        EXPECT_GE(r.mean_sum_rate, 0.0);
        EXPECT_GE(r.std_error, 0.0);
        EXPECT_EQ(r.trials, 5u);
        EXPECT_EQ(r.num_bs, 3u);
        EXPECT_EQ(r.precoder, PrecoderKind::DVSINR);
    }
    EXPECT_EQ(rows[0].mean_metrics_per_bs, 0.0); // O-GCSI reports no metrics
    EXPECT_EQ(rows[1].mean_metrics_per_bs, 8.0); // O-MUS reports the whole catalogue
}

TEST(Sweep, DeterministicAtAnyWorkerCount)
{
    ExperimentConfig cfg = small(PrecoderKind::DVSINR, 2);
    const std::string a = csv(run_sweep(cfg));
    EXPECT_EQ(a, csv(run_sweep(cfg)));
    for (std::size_t w : {2u, 3u, 8u})
    {
        cfg.workers = w;
        EXPECT_EQ(a, csv(run_sweep(cfg)));
    }
    cfg.seed += 1;
    EXPECT_NE(a, csv(run_sweep(cfg)));
}

TEST(Sweep, ExhaustiveSearchDominatesEveryTrial)
{
    for (auto [kind, nt] : {std::pair{PrecoderKind::DZF, std::size_t{3}}, {PrecoderKind::DVSINR, std::size_t{3}},
                            {PrecoderKind::DVSINR, std::size_t{2}}})
    {
        const ExperimentConfig cfg = small(kind, nt);
        const auto trials = simulate_trials(cfg, cfg.net.users_per_bs);
        for (const auto &t : trials)
            for (const auto &per_rho : t.results)
                for (const auto &s : per_rho)
                    EXPECT_LE(s.sum_rate, per_rho[0].sum_rate);
    }
}

TEST(Sweep, PrunedCatalogueBound)
{
    ExperimentConfig cfg = small(PrecoderKind::DZF, 3);
    cfg.net.users_per_bs = 10;
    cfg.rho_db_grid = {10.0};
    cfg.strategies = {Strategy::RMUS, Strategy::RNSPA};
    for (const auto &t : simulate_trials(cfg, 10))
        for (const auto &s : t.results[0])
        {
            EXPECT_LE(s.catalogue_size, 64u);
            EXPECT_EQ(s.metrics_per_bs, s.catalogue_size);
        }
}

TEST(Sweep, StandardErrorShrinksWithTrials)
{
    ExperimentConfig cfg = small(PrecoderKind::DZF, 3);
    cfg.rho_db_grid = {10.0};
    cfg.strategies = {Strategy::MAXSNR};
    cfg.net.users_per_bs = 2;
    cfg.trials = 500;
    const double se500 = run_sweep(cfg)[0].std_error;
    cfg.trials = 2000;
    const double se2000 = run_sweep(cfg)[0].std_error;
    EXPECT_LT(se2000, se500);
    EXPECT_NEAR(se500 / se2000, 2.0, 0.4);
}

TEST(Sweep, TrialStreamIndependentOfGrids)
{
    // a trial's deployment depends only on (seed, trial)
    ExperimentConfig one = small(PrecoderKind::DZF, 3);
    one.rho_db_grid = {10.0};
    one.trials = 6;
    ExperimentConfig two = one;
    two.rho_db_grid = {0.0, 10.0};
    const auto a = simulate_trials(one, 4);
    const auto b = simulate_trials(two, 4);
    for (std::size_t t = 0; t < 6; ++t)
        for (std::size_t s = 0; s < one.strategies.size(); ++s)
            EXPECT_EQ(a[t].results[0][s].sum_rate, b[t].results[1][s].sum_rate);
}

TEST(ParallelFor, PropagatesFailure)
{
    EXPECT_THROW(parallel_for(100, 4,
                              [](std::size_t i) {
                                  if (i == 37)
                                      throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}

TEST(ResultsCsv, HeaderAndPrecision)
{
    ResultRow r;
    r.strategy = Strategy::RNSPA;
    r.precoder = PrecoderKind::DVSINR;
    r.num_bs = 3;
    r.num_antennas = 2;
    r.users_per_bs = 10;
    r.rho_db = 20;
    r.mean_sum_rate = 1.0 / 3.0;
    r.std_error = 0.01;
    r.trials = 2000;
    r.mean_metrics_per_bs = 12.5;
    EXPECT_EQ(csv({r}), "strategy,precoder,B,Nt,K,rho_db,mean_sum_rate,std_error,trials,mean_metrics_per_bs\n"
                        "R-NSPA,DVSINR,3,2,10,20,0.3333333333,0.01,2000,12.5\n");
}
