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


#ifndef CBF_HARNESS_HPP
#define CBF_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cbf/channel.hpp"
#include "cbf/error.hpp"
#include "cbf/precoding.hpp"
#include "cbf/scheduler.hpp"

namespace cbf
{

struct ExperimentConfig
{
    NetworkConfig net;                 // users_per_bs is overridden by k_grid entries
    std::vector<double> rho_db_grid{10.0};
    std::vector<std::size_t> k_grid;   // empty: just net.users_per_bs
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    PrecoderKind precoder = PrecoderKind::DZF;
    std::vector<Strategy> strategies{Strategy::OGCSI};
    std::size_t workers = 1;

    std::vector<std::size_t> users_grid() const
    {
        return k_grid.empty() ? std::vector<std::size_t>{net.users_per_bs} : k_grid;
    }

    void validate() const
    {
        for (std::size_t k : users_grid())
        {
            NetworkConfig n = net;
            n.users_per_bs = k;
            n.validate();
        }
        if (trials < 1)
            throw ConfigError("trials must be at least 1");
        if (rho_db_grid.empty())
            throw ConfigError("rho_db_grid must not be empty");
        for (double r : rho_db_grid)
            if (!std::isfinite(r))
                throw ConfigError("rho_db_grid entries must be finite");
        if (strategies.empty())
            throw ConfigError("no strategies selected");
        if (std::set<Strategy>(strategies.begin(), strategies.end()).size() != strategies.size())
            throw ConfigError("duplicate strategy");
        if (workers < 1)
            throw ConfigError("workers must be at least 1");

        const bool power_limited = net.num_antennas >= net.num_bs;
        if (precoder == PrecoderKind::DZF && !power_limited)
            throw ConfigError("DZF undefined for Nt < B");
        for (Strategy s : strategies)
        {
            const auto m = metric_of(s);
            if (m == MetricKind::MUS && !power_limited)
                throw ConfigError(to_string(s) + " requires Nt >= B (use MUS2 or NSPA strategies)");
            if (m == MetricKind::MUS2 && power_limited)
                throw ConfigError(to_string(s) + " requires Nt < B");
        }
    }
};

namespace detail
{

inline std::string trim(std::string s)
{
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

inline double to_double(const std::string &key, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return d;
    }
    catch (const std::exception &)
    {
        throw ConfigError("'" + key + "': not a number: '" + v + "'");
    }
}

inline std::uint64_t to_uint(const std::string &key, const std::string &v)
{
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("'" + key + "': not a nonnegative integer: '" + v + "'");
    try
    {
        return std::stoull(v);
    }
    catch (const std::exception &)
    {
        throw ConfigError("'" + key + "': integer out of range: '" + v + "'");
    }
}

} // namespace detail

inline std::vector<double> parse_double_list(const std::string &key, const std::string &value)
{
    std::vector<double> out;
    for (const auto &item : detail::split_list(value))
        out.push_back(detail::to_double(key, item));
    if (out.empty())
        throw ConfigError("'" + key + "': empty list");
    return out;
}

inline std::vector<Strategy> parse_strategy_list(const std::string &value)
{
    std::vector<Strategy> out;
    for (const auto &item : detail::split_list(value))
        out.push_back(parse_strategy(item));
    return out;
}

/// Applies one `key = value` setting. Keys are case-insensitive.
inline void apply_setting(ExperimentConfig &cfg, const std::string &raw_key, const std::string &value)
{
    const std::string key = detail::lower(detail::trim(raw_key));
    if (key == "b")
        cfg.net.num_bs = detail::to_uint(raw_key, value);
    else if (key == "nt")
        cfg.net.num_antennas = detail::to_uint(raw_key, value);
    else if (key == "k")
    {
        cfg.net.users_per_bs = detail::to_uint(raw_key, value);
        cfg.k_grid.clear();
    }
    else if (key == "k_grid")
    {
        cfg.k_grid.clear();
        for (const auto &item : detail::split_list(value))
            cfg.k_grid.push_back(detail::to_uint(raw_key, item));
        if (cfg.k_grid.empty())
            throw ConfigError("'K_grid': empty list");
    }
    else if (key == "rho_db_grid" || key == "rho_db")
        cfg.rho_db_grid = parse_double_list(raw_key, value);
    else if (key == "trials")
        cfg.trials = detail::to_uint(raw_key, value);
    else if (key == "seed")
        cfg.seed = detail::to_uint(raw_key, value);
    else if (key == "precoder")
        cfg.precoder = parse_precoder_kind(value);
    else if (key == "strategies")
        cfg.strategies = parse_strategy_list(value);
    else if (key == "r" || key == "cell_radius")
        cfg.net.cell_radius = detail::to_double(raw_key, value);
    else if (key == "r_coop" || key == "coop_radius")
        cfg.net.coop_radius = detail::to_double(raw_key, value);
    else if (key == "workers")
        cfg.workers = detail::to_uint(raw_key, value);
    else
        throw ConfigError("unknown config key '" + raw_key + "'");
}

/// Flat `key = value` format, `#` starts a comment, lists are comma-separated.
inline ExperimentConfig parse_config(std::istream &is, ExperimentConfig cfg = {})
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        apply_setting(cfg, line.substr(0, eq), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

struct ResultRow
{
    Strategy strategy = Strategy::OGCSI;
    PrecoderKind precoder = PrecoderKind::DZF;
    std::size_t num_bs = 0;
    std::size_t num_antennas = 0;
    std::size_t users_per_bs = 0;
    double rho_db = 0.0;
    double mean_sum_rate = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    double mean_metrics_per_bs = 0.0;
};

// Compact record of one strategy on one trial at one SNR point.
struct StrategyResult
{
    double sum_rate = 0.0;
    std::size_t metrics_per_bs = 0;
    std::size_t catalogue_size = 0;
    std::vector<UserIndex> members;
};

// results[rho index][strategy index]
struct TrialResult
{
    std::vector<std::vector<StrategyResult>> results;
};

/// Calls body(i) for i in [0, n) on `workers` threads. Output must be written
/// by index so the result does not depend on scheduling.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> &body)
{
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

/// One trial: a fresh deployment shared by every SNR point and strategy.
inline TrialResult run_trial(const ExperimentConfig &cfg, const NetworkConfig &net, std::size_t trial)
{
    const ChannelRealization real = deploy(net, stream_seed(cfg.seed, trial));
    TrialResult tr;
    tr.results.resize(cfg.rho_db_grid.size());
    for (std::size_t r = 0; r < cfg.rho_db_grid.size(); ++r)
    {
        const double rho = db_to_linear(cfg.rho_db_grid[r]) / net.noise_power;
        RateTable table(real, cfg.precoder, rho);
        for (Strategy s : cfg.strategies)
        {
            const SelectionOutcome o = run_strategy(s, real, cfg.precoder, rho, table);
            tr.results[r].push_back({o.sum_rate, o.metrics_reported_per_bs, o.catalogue_size, o.chosen.members});
        }
    }
    return tr;
}

inline std::vector<TrialResult> simulate_trials(const ExperimentConfig &cfg, std::size_t users_per_bs)
{
    cfg.validate();
    NetworkConfig net = cfg.net;
    net.users_per_bs = users_per_bs;
    std::vector<TrialResult> out(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) { out[t] = run_trial(cfg, net, t); });
    return out;
}

inline std::vector<ResultRow> aggregate(const ExperimentConfig &cfg, std::size_t users_per_bs,
                                        const std::vector<TrialResult> &trials)
{
    std::vector<ResultRow> rows;
    const double n = static_cast<double>(trials.size());
    for (std::size_t r = 0; r < cfg.rho_db_grid.size(); ++r)
        for (std::size_t s = 0; s < cfg.strategies.size(); ++s)
        {
            double sum = 0.0, metrics = 0.0;
            for (const auto &t : trials)
            {
                sum += t.results[r][s].sum_rate;
                metrics += static_cast<double>(t.results[r][s].metrics_per_bs);
            }
            const double mean = sum / n;
            double ss = 0.0;
            for (const auto &t : trials)
                ss += (t.results[r][s].sum_rate - mean) * (t.results[r][s].sum_rate - mean);
            ResultRow row;
            row.strategy = cfg.strategies[s];
            row.precoder = cfg.precoder;
            row.num_bs = cfg.net.num_bs;
            row.num_antennas = cfg.net.num_antennas;
            row.users_per_bs = users_per_bs;
            row.rho_db = cfg.rho_db_grid[r];
            row.mean_sum_rate = mean;
            row.std_error = trials.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
            row.trials = trials.size();
            row.mean_metrics_per_bs = metrics / n;
            rows.push_back(row);
        }
    return rows;
}

/// Monte Carlo sweep over the K and SNR grids; rows ordered by K, then SNR,
/// then strategy as listed in the config.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig &cfg)
{
    cfg.validate();
    std::vector<ResultRow> rows;
    for (std::size_t k : cfg.users_grid())
    {
        const auto trials = simulate_trials(cfg, k);
        const auto part = aggregate(cfg, k, trials);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

inline void write_results_csv(std::ostream &os, const std::vector<ResultRow> &rows)
{
    os << "strategy,precoder,B,Nt,K,rho_db,mean_sum_rate,std_error,trials,mean_metrics_per_bs\n";
    char buf[256];
    for (const auto &r : rows)
    {
        std::snprintf(buf, sizeof buf, "%s,%s,%zu,%zu,%zu,%.10g,%.10g,%.10g,%zu,%.10g\n", to_string(r.strategy).c_str(),
                      to_string(r.precoder).c_str(), r.num_bs, r.num_antennas, r.users_per_bs, r.rho_db,
                      r.mean_sum_rate, r.std_error, r.trials, r.mean_metrics_per_bs);
        os << buf;
    }
}

} // namespace cbf

#endif // CBF_HARNESS_HPP
