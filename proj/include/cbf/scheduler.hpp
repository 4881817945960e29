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


#ifndef CBF_SCHEDULER_HPP
#define CBF_SCHEDULER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbf/candidate_set.hpp"
#include "cbf/channel.hpp"
#include "cbf/error.hpp"
#include "cbf/metrics.hpp"
#include "cbf/precoding.hpp"

namespace cbf
{

enum class Strategy
{
    OGCSI,
    OMUS,
    RMUS,
    OMUS2,
    RMUS2,
    ONSPA,
    RNSPA,
    MAXSNR
};

inline constexpr Strategy kAllStrategies[] = {Strategy::OGCSI, Strategy::OMUS,  Strategy::RMUS,  Strategy::OMUS2,
                                              Strategy::RMUS2, Strategy::ONSPA, Strategy::RNSPA, Strategy::MAXSNR};

inline std::string to_string(Strategy s)
{
    switch (s)
    {
    case Strategy::OGCSI: return "O-GCSI";
    case Strategy::OMUS: return "O-MUS";
    case Strategy::RMUS: return "R-MUS";
    case Strategy::OMUS2: return "O-MUS2";
    case Strategy::RMUS2: return "R-MUS2";
    case Strategy::ONSPA: return "O-NSPA";
    case Strategy::RNSPA: return "R-NSPA";
    case Strategy::MAXSNR: return "MAX-SNR";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view s)
{
    for (Strategy st : kAllStrategies)
        if (to_string(st) == s)
            return st;
    throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

inline bool is_pruned(Strategy s) { return s == Strategy::RMUS || s == Strategy::RMUS2 || s == Strategy::RNSPA; }

inline std::optional<MetricKind> metric_of(Strategy s)
{
    switch (s)
    {
    case Strategy::OMUS:
    case Strategy::RMUS: return MetricKind::MUS;
    case Strategy::OMUS2:
    case Strategy::RMUS2: return MetricKind::MUS2;
    case Strategy::ONSPA:
    case Strategy::RNSPA: return MetricKind::NSPA;
    default: return std::nullopt;
    }
}

using Pools = std::vector<std::vector<UserIndex>>;

/// Every combination of one user per pool, last BS varying fastest, so that
/// set l has the same members at every BS.
inline std::vector<CandidateSet> enumerate_sets(const Pools &pools)
{
    if (pools.empty())
        throw Error("enumerate_sets: no pools");
    std::size_t total = 1;
    for (const auto &p : pools)
    {
        if (p.empty())
            throw Error("enumerate_sets: empty user pool");
        total *= p.size();
    }

    std::vector<CandidateSet> out;
    out.reserve(total);
    std::vector<std::size_t> pos(pools.size(), 0);
    for (std::size_t l = 0; l < total; ++l)
    {
        CandidateSet s;
        s.index = l;
        s.members.resize(pools.size());
        for (std::size_t b = 0; b < pools.size(); ++b)
            s.members[b] = pools[b][pos[b]];
        out.push_back(std::move(s));
        for (std::size_t b = pools.size(); b-- > 0;)
        {
            if (++pos[b] < pools[b].size())
                break;
            pos[b] = 0;
        }
    }
    return out;
}

// Catalogue position of `members` within enumerate_sets(pools).
inline std::size_t catalogue_index(const Pools &pools, const std::vector<UserIndex> &members)
{
    if (members.size() != pools.size())
        throw Error("catalogue_index: set size mismatch");
    std::size_t idx = 0;
    for (std::size_t b = 0; b < pools.size(); ++b)
    {
        const auto it = std::find(pools[b].begin(), pools[b].end(), members[b]);
        if (it == pools[b].end())
            throw Error("catalogue_index: member not in pool");
        idx = idx * pools[b].size() + static_cast<std::size_t>(it - pools[b].begin());
    }
    return idx;
}

struct SelectionOutcome
{
    Strategy strategy = Strategy::OGCSI;
    std::size_t chosen_l = 0; // index in the catalogue the strategy searched
    CandidateSet chosen;
    std::size_t catalogue_size = 0;
    std::size_t metrics_reported_per_bs = 0;
    double sum_rate = 0.0;
};

/// True sum rates of the full catalogue of one trial, computed on demand so
/// that every strategy scores its pick with bit-identical arithmetic.
class RateTable
{
  public:
    RateTable(const ChannelRealization &real, PrecoderKind kind, double rho)
        : real_(real), kind_(kind), rho_(rho), pools_(real.pools())
    {
        std::size_t total = 1;
        for (const auto &p : pools_)
            total *= p.size();
        rates_.assign(total, std::numeric_limits<double>::quiet_NaN());
    }

    const Pools &pools() const { return pools_; }
    std::size_t size() const { return rates_.size(); }

    double rate(const CandidateSet &set)
    {
        double &r = rates_[catalogue_index(pools_, set.members)];
        if (std::isnan(r))
            r = set_sum_rate(real_, set, kind_, rho_);
        return r;
    }

  private:
    const ChannelRealization &real_;
    PrecoderKind kind_;
    double rho_;
    Pools pools_;
    std::vector<double> rates_;
};

// Lowest-index argmax of a score vector.
inline std::size_t argmax_lowest(const std::vector<double> &score)
{
    std::size_t best = 0;
    for (std::size_t l = 1; l < score.size(); ++l)
        if (score[l] > score[best])
            best = l;
    return best;
}

/// Exhaustive search over true sum rates; needs global CSI at the CU.
inline SelectionOutcome select_ogcsi(const ChannelRealization &real, const std::vector<CandidateSet> &sets,
                                     PrecoderKind kind, double rho, RateTable *table = nullptr)
{
    if (sets.empty())
        throw Error("select_ogcsi: empty catalogue");
    std::optional<RateTable> local;
    if (table == nullptr)
        table = &local.emplace(real, kind, rho);

    std::vector<double> rates(sets.size());
    for (std::size_t l = 0; l < sets.size(); ++l)
        rates[l] = table->rate(sets[l]);

    SelectionOutcome out;
    out.strategy = Strategy::OGCSI;
    out.chosen_l = argmax_lowest(rates);
    out.chosen = sets[out.chosen_l];
    out.catalogue_size = sets.size();
    out.metrics_reported_per_bs = 0;
    out.sum_rate = rates[out.chosen_l];
    return out;
}

/// CU rule: l* = argmax_l prod_b g_{bl}, evaluated as a sum of logs with
/// g = 0 mapped to -inf. Ties go to the lowest l.
inline std::size_t select_by_metric_product(const std::vector<std::vector<double>> &metrics)
{
    if (metrics.empty() || metrics.front().empty())
        throw Error("incomplete backhaul");
    const std::size_t L = metrics.front().size();
    std::vector<double> score(L, 0.0);
    for (const auto &per_bs : metrics)
    {
        if (per_bs.size() != L)
            throw Error("incomplete backhaul");
        for (std::size_t l = 0; l < L; ++l)
        {
            const double g = per_bs[l];
            if (!(g >= 0.0) || std::isinf(g))
                throw Error("select_by_metric_product: metric must be finite and nonnegative");
            score[l] += g > 0.0 ? std::log(g) : -std::numeric_limits<double>::infinity();
        }
    }
    return argmax_lowest(score);
}

// Reassembles a metric matrix from backhaul triples for a catalogue of size L.
inline std::vector<std::vector<double>> collect_reports(std::span<const SelectionMetric> reports, std::size_t num_bs,
                                                        std::size_t L)
{
    std::vector<std::vector<double>> m(num_bs, std::vector<double>(L, std::numeric_limits<double>::quiet_NaN()));
    for (const auto &r : reports)
    {
        if (r.b >= num_bs || r.l >= L)
            throw Error("backhaul report out of range");
        m[r.b][r.l] = r.value;
    }
    for (const auto &row : m)
        for (double v : row)
            if (std::isnan(v))
                throw Error("incomplete backhaul");
    return m;
}

/// BS-side metric evaluation: row b holds g_{bl} for every set of the
/// catalogue, computed from BS b's local channels only.
inline std::vector<std::vector<double>> compute_metrics(const ChannelRealization &real,
                                                        const std::vector<CandidateSet> &sets, MetricKind metric,
                                                        PrecoderKind kind, double rho)
{
    const std::size_t B = real.num_bs();
    std::vector<std::vector<double>> g(B, std::vector<double>(sets.size()));
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t l = 0; l < sets.size(); ++l)
        {
            const CandidateSet &s = sets[l];
            const CVector &h = real.h(b, s[b]);
            const CMatrix Ht = aggregate_interference_matrix(real, b, s);
            switch (metric)
            {
            case MetricKind::MUS: g[b][l] = metric_mus(h, Ht, rho, kind); break;
            case MetricKind::MUS2: g[b][l] = metric_mus2(h, local_channel_matrix(real, b, s), Ht, rho); break;
            case MetricKind::NSPA: g[b][l] = metric_nspa(h, Ht); break;
            }
        }
    return g;
}

/// Pre-selection at BS b: the strongest user on each antenna plus the
/// largest-norm user, deduplicated, ascending. At most Nt + 1 users.
inline std::vector<UserIndex> prune_pools(const ChannelRealization &real, std::size_t b)
{
    const auto pool = real.pool(b);
    std::vector<UserIndex> keep;
    for (std::size_t n = 0; n < real.num_antennas(); ++n)
    {
        UserIndex best = pool.front();
        double best_mag = -1.0;
        for (UserIndex k : pool)
        {
            const double mag = std::abs(real.h(b, k)(static_cast<Eigen::Index>(n)));
            if (mag > best_mag)
            {
                best_mag = mag;
                best = k;
            }
        }
        keep.push_back(best);
    }
    UserIndex strongest = pool.front();
    double best_norm = -1.0;
    for (UserIndex k : pool)
    {
        const double nrm = real.h(b, k).squaredNorm();
        if (nrm > best_norm)
        {
            best_norm = nrm;
            strongest = k;
        }
    }
    keep.push_back(strongest);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    return keep;
}

inline Pools pruned_pools(const ChannelRealization &real)
{
    Pools out;
    for (std::size_t b = 0; b < real.num_bs(); ++b)
        out.push_back(prune_pools(real, b));
    return out;
}

/// Selfish baseline: every BS serves its largest-norm user.
inline CandidateSet select_max_snr(const ChannelRealization &real)
{
    CandidateSet s;
    s.members.resize(real.num_bs());
    for (std::size_t b = 0; b < real.num_bs(); ++b)
    {
        const auto pool = real.pool(b);
        UserIndex best = pool.front();
        double best_norm = -1.0;
        for (UserIndex k : pool)
        {
            const double nrm = real.h(b, k).squaredNorm();
            if (nrm > best_norm)
            {
                best_norm = nrm;
                best = k;
            }
        }
        s.members[b] = best;
    }
    s.index = catalogue_index(real.pools(), s.members);
    return s;
}

/// Runs one strategy on one realisation; the chosen set is scored through
/// `table` so that all strategies of a trial share the same arithmetic.
inline SelectionOutcome run_strategy(Strategy strategy, const ChannelRealization &real, PrecoderKind kind, double rho,
                                     RateTable &table)
{
    if (strategy == Strategy::OGCSI)
        return select_ogcsi(real, enumerate_sets(table.pools()), kind, rho, &table);

    SelectionOutcome out;
    out.strategy = strategy;
    if (strategy == Strategy::MAXSNR)
    {
        out.chosen = select_max_snr(real);
        out.chosen_l = out.chosen.index;
        out.catalogue_size = table.size();
        out.metrics_reported_per_bs = 0;
        out.sum_rate = table.rate(out.chosen);
        return out;
    }

    const Pools pools = is_pruned(strategy) ? pruned_pools(real) : table.pools();
    const auto sets = enumerate_sets(pools);
    const auto g = compute_metrics(real, sets, *metric_of(strategy), kind, rho);
    out.chosen_l = select_by_metric_product(g);
    out.chosen = sets[out.chosen_l];
    out.catalogue_size = sets.size();
    out.metrics_reported_per_bs = sets.size();
    out.sum_rate = table.rate(out.chosen);
    return out;
}

} // namespace cbf

#endif // CBF_SCHEDULER_HPP
