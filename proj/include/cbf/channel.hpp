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


#ifndef CBF_CHANNEL_HPP
#define CBF_CHANNEL_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cbf/candidate_set.hpp"
#include "cbf/error.hpp"
#include "cbf/linalg.hpp"

namespace cbf
{

/// Cluster geometry and link parameters.
///
/// BSs sit on the vertices of a regular polygon at distance `cell_radius` from
/// the cluster centre; cell-edge users are dropped uniformly on the disk of
/// radius `coop_radius` around that centre. Path loss is normalised so that a
/// user at distance `cell_radius` sees unit long-term gain, which makes `rho`
/// the SNR at the cell border.
struct NetworkConfig
{
    std::size_t num_bs = 3;       // B
    std::size_t num_antennas = 3; // Nt
    std::size_t users_per_bs = 10; // K
    double cell_radius = 1000.0;  // m
    double coop_radius = 300.0;   // m
    double pathloss_exponent = 4.0;
    double noise_power = 1.0;
    double rho_db = 10.0;

    std::size_t num_users() const { return num_bs * users_per_bs; }

    // Null-space dimension max(Nt - (B - 1), 0).
    std::size_t null_dim() const
    {
        return num_antennas + 1 > num_bs ? num_antennas + 1 - num_bs : 0;
    }

    void validate() const
    {
        if (num_bs < 2)
            throw ConfigError("B must be at least 2");
        if (num_antennas < 2)
            throw ConfigError("Nt must be at least 2");
        if (users_per_bs < 1)
            throw ConfigError("K must be at least 1");
        if (!(cell_radius > 0.0) || !(coop_radius > 0.0))
            throw ConfigError("radii must be positive");
        if (!(coop_radius < cell_radius))
            throw ConfigError("cooperation radius must be smaller than the cell radius");
        if (!(noise_power > 0.0))
            throw ConfigError("noise power must be positive");
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// All channels of one trial: h(b, k) for every BS b and every user k in the
/// cluster, not only the users BS b serves.
class ChannelRealization
{
  public:
    ChannelRealization() = default;
    ChannelRealization(std::size_t num_bs, std::size_t num_antennas, std::size_t users_per_bs)
        : num_bs_(num_bs), num_antennas_(num_antennas), users_per_bs_(users_per_bs),
          h_(num_bs * num_bs * users_per_bs, CVector::Zero(static_cast<Eigen::Index>(num_antennas))),
          gain_(num_bs * num_bs * users_per_bs, 1.0), positions_(num_bs * users_per_bs),
          bs_positions_(num_bs)
    {
    }

    std::size_t num_bs() const { return num_bs_; }
    std::size_t num_antennas() const { return num_antennas_; }
    std::size_t users_per_bs() const { return users_per_bs_; }
    std::size_t num_users() const { return num_bs_ * users_per_bs_; }

    const CVector &h(std::size_t b, UserIndex k) const { return h_[b * num_users() + k]; }
    CVector &h(std::size_t b, UserIndex k) { return h_[b * num_users() + k]; }
    double gain(std::size_t b, UserIndex k) const { return gain_[b * num_users() + k]; }
    double &gain(std::size_t b, UserIndex k) { return gain_[b * num_users() + k]; }

    // Users are numbered so that S_b = {b K, ..., b K + K - 1}.
    std::size_t owner(UserIndex k) const { return k / users_per_bs_; }

    std::vector<UserIndex> pool(std::size_t b) const
    {
        std::vector<UserIndex> out(users_per_bs_);
        for (std::size_t i = 0; i < users_per_bs_; ++i)
            out[i] = b * users_per_bs_ + i;
        return out;
    }

    std::vector<std::vector<UserIndex>> pools() const
    {
        std::vector<std::vector<UserIndex>> out;
        for (std::size_t b = 0; b < num_bs_; ++b)
            out.push_back(pool(b));
        return out;
    }

    const Point &position(UserIndex k) const { return positions_[k]; }
    Point &position(UserIndex k) { return positions_[k]; }
    const Point &bs_position(std::size_t b) const { return bs_positions_[b]; }
    Point &bs_position(std::size_t b) { return bs_positions_[b]; }

    bool operator==(const ChannelRealization &o) const
    {
        if (num_bs_ != o.num_bs_ || num_antennas_ != o.num_antennas_ || users_per_bs_ != o.users_per_bs_)
            return false;
        for (std::size_t i = 0; i < h_.size(); ++i)
            if (h_[i] != o.h_[i] || gain_[i] != o.gain_[i])
                return false;
        for (std::size_t k = 0; k < positions_.size(); ++k)
            if (positions_[k].x != o.positions_[k].x || positions_[k].y != o.positions_[k].y)
                return false;
        return true;
    }

  private:
    std::size_t num_bs_ = 0;
    std::size_t num_antennas_ = 0;
    std::size_t users_per_bs_ = 0;
    std::vector<CVector> h_;
    std::vector<double> gain_;
    std::vector<Point> positions_;
    std::vector<Point> bs_positions_;
};

inline std::uint64_t splitmix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One 64-bit seed per (master seed, stream index). The master is hashed on
// its own first so that streams of different masters do not overlap.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index)
{
    constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    return splitmix64(splitmix64(master + kGolden) + (index + 1) * kGolden);
}

inline std::mt19937_64 make_engine(std::uint64_t seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

// Nt i.i.d. CN(0, 1) entries.
template <class Engine> CVector draw_cn_vector(Engine &eng, std::size_t n)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    CVector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        const double re = nd(eng);
        const double im = nd(eng);
        v(static_cast<Eigen::Index>(i)) = cplx(re, im);
    }
    return v;
}

template <class Engine> CMatrix draw_cn_matrix(Engine &eng, std::size_t rows, std::size_t cols)
{
    CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t c = 0; c < cols; ++c)
        m.col(static_cast<Eigen::Index>(c)) = draw_cn_vector(eng, rows);
    return m;
}

/// Drops users and draws one Rayleigh realisation; deterministic in `seed`.
inline ChannelRealization deploy(const NetworkConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    ChannelRealization real(cfg.num_bs, cfg.num_antennas, cfg.users_per_bs);
    for (std::size_t b = 0; b < cfg.num_bs; ++b)
    {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(b) / static_cast<double>(cfg.num_bs);
        real.bs_position(b) = {cfg.cell_radius * std::cos(phi), cfg.cell_radius * std::sin(phi)};
    }
    for (UserIndex k = 0; k < real.num_users(); ++k)
    {
        const double rad = cfg.coop_radius * std::sqrt(unif(eng));
        const double ang = 2.0 * std::numbers::pi * unif(eng);
        real.position(k) = {rad * std::cos(ang), rad * std::sin(ang)};
    }
    for (std::size_t b = 0; b < cfg.num_bs; ++b)
    {
        for (UserIndex k = 0; k < real.num_users(); ++k)
        {
            const double d = distance(real.bs_position(b), real.position(k));
            const double g = std::pow(d / cfg.cell_radius, -cfg.pathloss_exponent);
            real.gain(b, k) = g;
            real.h(b, k) = std::sqrt(g) * draw_cn_vector(eng, cfg.num_antennas);
        }
    }
    return real;
}

inline void check_set(const ChannelRealization &real, const CandidateSet &set)
{
    if (set.size() != real.num_bs())
        throw Error("malformed candidate set: need exactly one user per BS");
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set[i] >= real.num_users() || real.owner(set[i]) != i)
            throw Error("malformed candidate set: member not in the pool of its BS");
}

// H~ at BS b: local channels of every set member except the one b serves,
// in ascending BS order.
inline CMatrix aggregate_interference_matrix(const ChannelRealization &real, std::size_t b, const CandidateSet &set)
{
    check_set(real, set);
    if (b >= real.num_bs())
        throw Error("aggregate_interference_matrix: BS index out of range");
    CMatrix out(static_cast<Eigen::Index>(real.num_antennas()), static_cast<Eigen::Index>(real.num_bs() - 1));
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < real.num_bs(); ++i)
        if (i != b)
            out.col(c++) = real.h(b, set[i]);
    return out;
}

// H_b^(l): all local channels of the set at BS b, in BS order.
inline CMatrix local_channel_matrix(const ChannelRealization &real, std::size_t b, const CandidateSet &set)
{
    check_set(real, set);
    CMatrix out(static_cast<Eigen::Index>(real.num_antennas()), static_cast<Eigen::Index>(real.num_bs()));
    for (std::size_t i = 0; i < real.num_bs(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = real.h(b, set[i]);
    return out;
}

inline void write_channel_csv_header(std::ostream &os)
{
    os << "trial,b,k,antenna,re,im,gain\n";
}

inline void write_channel_csv(std::ostream &os, std::size_t trial, const ChannelRealization &real)
{
    char buf[160];
    for (std::size_t b = 0; b < real.num_bs(); ++b)
        for (UserIndex k = 0; k < real.num_users(); ++k)
            for (std::size_t n = 0; n < real.num_antennas(); ++n)
            {
                const cplx v = real.h(b, k)(static_cast<Eigen::Index>(n));
                std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.10g,%.10g,%.10g\n", trial, b, k, n, v.real(),
                              v.imag(), real.gain(b, k));
                os << buf;
            }
}

} // namespace cbf

#endif // CBF_CHANNEL_HPP
