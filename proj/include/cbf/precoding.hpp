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


#ifndef CBF_PRECODING_HPP
#define CBF_PRECODING_HPP

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbf/channel.hpp"
#include "cbf/error.hpp"
#include "cbf/linalg.hpp"

namespace cbf
{

enum class PrecoderKind
{
    DZF,
    DVSINR
};

inline std::string to_string(PrecoderKind k) { return k == PrecoderKind::DZF ? "DZF" : "DVSINR"; }

inline PrecoderKind parse_precoder_kind(std::string_view s)
{
    if (s == "DZF" || s == "dzf")
        return PrecoderKind::DZF;
    if (s == "DVSINR" || s == "dvsinr")
        return PrecoderKind::DVSINR;
    throw ConfigError("unknown precoder '" + std::string(s) + "' (expected DZF or DVSINR)");
}

struct Precoder
{
    CVector w; // unit norm, h^H w real and nonnegative
    PrecoderKind kind = PrecoderKind::DZF;
    double rho = 0.0; // linear SNR, DVSINR only
};

/// Distributed zero forcing: the unit vector in null(H~^H) closest to h.
///
/// With V an orthonormal basis of that null space, w = V (V^H h) / |V^H h|.
/// Needs Nt >= B, i.e. H~ with at most Nt - 1 columns.
inline Precoder dzf_precoder(const CVector &h, const CMatrix &Htilde)
{
    if (Htilde.rows() != h.size())
        throw Error("dzf_precoder: dimension mismatch");
    if (Htilde.cols() >= h.size())
        throw Error("DZF undefined for Nt < B");

    const NullSpace ns = null_space_basis(Htilde);
    if (ns.basis.cols() == 0)
        throw Error("DZF undefined for Nt < B");
    const CVector coeff = ns.basis.adjoint() * h;
    const double cn = coeff.norm();
    if (!(cn > 1e-14 * std::max(h.norm(), 1e-300)))
        throw Error("zero effective channel");

    Precoder p;
    p.w = ns.basis * (coeff / cn);
    p.w.normalize();
    p.kind = PrecoderKind::DZF;
    return p;
}

/// Distributed virtual SINR (leakage-based) precoder with unit leakage
/// weights: w = D h / |D h| where D = (rho^{-1} I + H~ H~^H)^{-1}.
inline Precoder dvsinr_precoder(const CVector &h, const CMatrix &Htilde, double rho)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw Error("dvsinr_precoder: rho must be positive and finite");
    if (Htilde.rows() != h.size())
        throw Error("dvsinr_precoder: dimension mismatch");
    if (!(h.norm() > 0.0))
        throw Error("dvsinr_precoder: zero channel");

    CMatrix C = Htilde * Htilde.adjoint();
    C.diagonal().array() += 1.0 / rho;

    Precoder p;
    p.w = solve_hpd(C, h);
    p.w.normalize();
    p.kind = PrecoderKind::DVSINR;
    p.rho = rho;
    return p;
}

inline Precoder make_precoder(PrecoderKind kind, const CVector &h, const CMatrix &Htilde, double rho)
{
    return kind == PrecoderKind::DZF ? dzf_precoder(h, Htilde) : dvsinr_precoder(h, Htilde, rho);
}

// |h^H w|^2
inline double effective_gain(const CVector &h, const CVector &w) { return std::norm(h.dot(w)); }

struct LinkBudget
{
    double signal = 0.0;               // |h_{b k_b}^H w_b|^2
    std::vector<double> interference;  // [j] = |h_{j k_b}^H w_j|^2, zero at j = b
    double sinr = 0.0;
    double rate = 0.0;                 // bit/s/Hz
};

inline std::vector<Precoder> set_precoders(const ChannelRealization &real, const CandidateSet &set,
                                           PrecoderKind kind, double rho)
{
    std::vector<Precoder> out;
    out.reserve(real.num_bs());
    for (std::size_t b = 0; b < real.num_bs(); ++b)
        out.push_back(make_precoder(kind, real.h(b, set[b]), aggregate_interference_matrix(real, b, set), rho));
    return out;
}

/// Per-BS signal, leakage received from the other BSs, SINR and rate when
/// every BS transmits with power rho (noise power normalised to one).
inline std::vector<LinkBudget> link_budgets(const ChannelRealization &real, const CandidateSet &set,
                                            PrecoderKind kind, double rho)
{
    const auto precoders = set_precoders(real, set, kind, rho);
    const std::size_t B = real.num_bs();
    std::vector<LinkBudget> out(B);
    for (std::size_t b = 0; b < B; ++b)
    {
        LinkBudget &lb = out[b];
        lb.signal = effective_gain(real.h(b, set[b]), precoders[b].w);
        lb.interference.assign(B, 0.0);
        double total = 0.0;
        for (std::size_t j = 0; j < B; ++j)
        {
            if (j == b)
                continue;
            lb.interference[j] = effective_gain(real.h(j, set[b]), precoders[j].w);
            total += lb.interference[j];
        }
        lb.sinr = rho * lb.signal / (rho * total + 1.0);
        lb.rate = std::log2(1.0 + lb.sinr);
    }
    return out;
}

inline double sum_rate(std::span<const LinkBudget> budgets)
{
    double s = 0.0;
    for (const auto &lb : budgets)
        s += std::log2(1.0 + lb.sinr);
    return s;
}

inline double set_sum_rate(const ChannelRealization &real, const CandidateSet &set, PrecoderKind kind, double rho)
{
    return sum_rate(link_budgets(real, set, kind, rho));
}

} // namespace cbf

#endif // CBF_PRECODING_HPP
