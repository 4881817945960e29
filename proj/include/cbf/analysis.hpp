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


#ifndef CBF_ANALYSIS_HPP
#define CBF_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "cbf/channel.hpp"
#include "cbf/error.hpp"
#include "cbf/linalg.hpp"
#include "cbf/metrics.hpp"
#include "cbf/precoding.hpp"

namespace cbf
{

// Tolerances of the distributional checks.
inline constexpr double kMeanTolerance = 0.02;
inline constexpr double kLimitTolerance = 1e-3;
inline constexpr double kSlopeTolerance = 0.1;
inline constexpr double kAlphaLimitTolerance = 0.01;

struct ReportRow
{
    std::string quantity;
    double grid_point = 0.0;
    double empirical = 0.0;
    double predicted = 0.0;
    double rel_error = 0.0;
    std::size_t samples = 0;
};

struct PropositionReport
{
    std::string id;
    std::size_t num_antennas = 0;
    std::size_t num_bs = 0;
    std::size_t samples = 0;
    std::vector<ReportRow> rows;
    std::vector<std::string> failures; // empty when every judged check holds
    double slope = std::numeric_limits<double>::quiet_NaN(); // prop4 only

    bool passed() const { return failures.empty(); }

    void add(std::string quantity, double grid, double empirical, double predicted)
    {
        const double err = predicted != 0.0 ? std::abs(empirical - predicted) / std::abs(predicted)
                                            : std::abs(empirical - predicted);
        rows.push_back({std::move(quantity), grid, empirical, predicted, err, samples});
    }

    const ReportRow *find(const std::string &quantity, double grid) const
    {
        for (const auto &r : rows)
            if (r.quantity == quantity && r.grid_point == grid)
                return &r;
        return nullptr;
    }
};

inline void write_report_csv_header(std::ostream &os)
{
    os << "proposition,grid_point,empirical,predicted,rel_error,samples\n";
}

inline void write_report_csv(std::ostream &os, const PropositionReport &rep)
{
    char buf[256];
    for (const auto &r : rep.rows)
    {
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g,%zu\n", r.quantity.c_str(), r.grid_point,
                      r.empirical, r.predicted, r.rel_error, r.samples);
        os << buf;
    }
}

/// One i.i.d. CN(0, 1) draw: intended channel plus B - 1 interferer columns.
struct IidSample
{
    CVector h;
    CMatrix Htilde;
};

inline IidSample draw_iid_sample(std::size_t nt, std::size_t num_bs, std::uint64_t seed, std::size_t index)
{
    auto eng = make_engine(stream_seed(seed, index));
    IidSample s;
    s.h = draw_cn_vector(eng, nt);
    s.Htilde = draw_cn_matrix(eng, nt, num_bs - 1);
    return s;
}

inline std::size_t null_dim(std::size_t nt, std::size_t num_bs) { return nt + 1 > num_bs ? nt + 1 - num_bs : 0; }

// Eigenvalues of D = (rho^{-1} I + H~ H~^H)^{-1}, descending, from those of
// H~ H~^H.
inline std::vector<double> d_eigvals(const std::vector<double> &gram_eigs_desc, double rho)
{
    std::vector<double> out;
    out.reserve(gram_eigs_desc.size());
    for (double mu : gram_eigs_desc)
        out.push_back(1.0 / (1.0 / rho + std::max(mu, 0.0)));
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// sin^2 of the angle between h and Sp(H~) through the chain of partial
/// correlation coefficients, interferers taken in column order. Times |h|^2
/// this is exactly the null-space projection.
inline double nsp_partial_correlation(const CVector &h, const CMatrix &Htilde)
{
    CVector hr = h;
    std::vector<CVector> basis; // orthonormalised previous interferers
    double prod = 1.0;
    for (Eigen::Index i = 0; i < Htilde.cols(); ++i)
    {
        CVector v = Htilde.col(i);
        for (const auto &q : basis)
            v -= q * q.dot(v);
        const double vn = v.norm();
        const double hn = hr.norm();
        if (!(vn > 0.0) || !(hn > 0.0))
            continue;
        const double eta = std::min(1.0, std::abs(hr.dot(v)) / (hn * vn));
        prod *= std::max(0.0, 1.0 - eta * eta);
        const CVector q = v / vn;
        hr -= q * q.dot(hr);
        basis.push_back(q);
    }
    return prod;
}

inline void require_power_limited(std::size_t nt, std::size_t num_bs, const char *what)
{
    if (num_bs < 2 || nt < 2)
        throw ConfigError(std::string(what) + ": need B >= 2 and Nt >= 2");
    if (nt < num_bs)
        throw ConfigError(std::string(what) + ": approximation requires Nt >= B");
}

/// Mean DZF effective gain against (eps / Nt) E|h|^2, plus the mean squared
/// cosine between h and one null-space basis vector against 1 / Nt.
inline PropositionReport check_prop1(std::size_t nt, std::size_t num_bs, std::size_t samples, std::uint64_t seed)
{
    require_power_limited(nt, num_bs, "check_prop1");
    const double eps = static_cast<double>(null_dim(nt, num_bs));
    double gain = 0.0, norm2 = 0.0, cos2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i)
    {
        const IidSample s = draw_iid_sample(nt, num_bs, seed, i);
        const Precoder p = dzf_precoder(s.h, s.Htilde);
        gain += effective_gain(s.h, p.w);
        norm2 += s.h.squaredNorm();
        const CMatrix V = null_space_basis(s.Htilde).basis;
        cos2 += std::pow(correlation_coeff(s.h, V.col(0)), 2);
    }
    const double n = static_cast<double>(samples);

    PropositionReport rep;
    rep.id = "prop1";
    rep.num_antennas = nt;
    rep.num_bs = num_bs;
    rep.samples = samples;
    rep.add("prop1", static_cast<double>(nt), gain / n, eps / static_cast<double>(nt) * norm2 / n);
    rep.add("prop1-cos2", static_cast<double>(nt), cos2 / n, 1.0 / static_cast<double>(nt));
    for (const auto &r : rep.rows)
        if (r.rel_error > kMeanTolerance)
            rep.failures.push_back(r.quantity + ": relative error " + std::to_string(r.rel_error));
    return rep;
}

/// Normalised DVSINR gain against the Jain index of eig(D) over an SNR grid
/// ("prop2"), and E[J(eig(D))] against its high-SNR limit eps / Nt ("prop3").
/// The approximation is judged only at the grid extremes (rho <= 1e-6 and
/// rho >= 1e6) where it is tight; the limit only at rho >= 1e6.
inline PropositionReport check_prop2_prop3(std::size_t nt, std::size_t num_bs, const std::vector<double> &rho_grid,
                                           std::size_t samples, std::uint64_t seed)
{
    require_power_limited(nt, num_bs, "check_prop2_prop3");
    if (rho_grid.empty())
        throw Error("check_prop2_prop3: empty SNR grid");
    const double limit = static_cast<double>(null_dim(nt, num_bs)) / static_cast<double>(nt);

    std::vector<double> gain(rho_grid.size(), 0.0), jain(rho_grid.size(), 0.0);
    for (std::size_t i = 0; i < samples; ++i)
    {
        const IidSample s = draw_iid_sample(nt, num_bs, seed, i);
        const auto mu = hermitian_eigvals(s.Htilde * s.Htilde.adjoint());
        const double h2 = s.h.squaredNorm();
        for (std::size_t r = 0; r < rho_grid.size(); ++r)
        {
            const Precoder p = dvsinr_precoder(s.h, s.Htilde, rho_grid[r]);
            gain[r] += effective_gain(s.h, p.w) / h2;
            jain[r] += jain_index(d_eigvals(mu, rho_grid[r]));
        }
    }
    const double n = static_cast<double>(samples);

    PropositionReport rep;
    rep.id = "prop2";
    rep.num_antennas = nt;
    rep.num_bs = num_bs;
    rep.samples = samples;
    for (std::size_t r = 0; r < rho_grid.size(); ++r)
        rep.add("prop2", rho_grid[r], gain[r] / n, jain[r] / n);
    for (std::size_t r = 0; r < rho_grid.size(); ++r)
        rep.add("prop3", rho_grid[r], jain[r] / n, limit);

    for (std::size_t r = 0; r < rho_grid.size(); ++r)
    {
        const double rho = rho_grid[r];
        if (rho <= 1e-6 || rho >= 1e6)
        {
            const auto *row = rep.find("prop2", rho);
            if (row->rel_error > kMeanTolerance)
                rep.failures.push_back("prop2 at rho=" + std::to_string(rho) + ": relative error " +
                                       std::to_string(row->rel_error));
        }
    }
    const double rho_top = *std::max_element(rho_grid.begin(), rho_grid.end());
    if (rho_top >= 1e6)
    {
        const auto *row = rep.find("prop3", rho_top);
        if (std::abs(row->empirical - limit) > kLimitTolerance)
            rep.failures.push_back("prop3: |E[J] - eps/Nt| = " + std::to_string(std::abs(row->empirical - limit)));
    }
    return rep;
}

// Least-squares slope of log10(y) against log10(x).
inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += std::log10(x[i]);
        my += std::log10(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double dx = std::log10(x[i]) - mx;
        sxy += dx * (std::log10(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

/// DVSINR leakage |h2^H w1|^2 onto the first interferer column, against the
/// trace-ratio upper bound and the lambda_min approximation. Rows:
///   prop4-bound   empirical leakage vs mean bound
///   prop4-approx  empirical leakage vs mean approximation
///   prop4-mf      empirical leakage vs matched-filter leakage
/// Judged: bound >= empirical everywhere; matched-filter agreement within 3%
/// at rho <= 1e-6; log-log slope over grid points in [1e3, 1e5] equal to -2
/// within 0.1 when at least two such points exist.
inline PropositionReport check_prop4_leakage(std::size_t nt, std::size_t num_bs, const std::vector<double> &rho_grid,
                                             std::size_t samples, std::uint64_t seed)
{
    require_power_limited(nt, num_bs, "check_prop4_leakage");
    if (rho_grid.empty())
        throw Error("check_prop4_leakage: empty SNR grid");
    const std::size_t eps = null_dim(nt, num_bs);
    const std::size_t span_dim = num_bs - 1;

    const std::size_t R = rho_grid.size();
    std::vector<double> leak(R, 0.0), bound(R, 0.0), approx(R, 0.0), mf(R, 0.0);
    for (std::size_t i = 0; i < samples; ++i)
    {
        const IidSample s = draw_iid_sample(nt, num_bs, seed, i);
        const CVector h2 = s.Htilde.col(0);
        const double h2n = h2.squaredNorm();
        const auto mu = hermitian_eigvals(s.Htilde * s.Htilde.adjoint());
        const double lmin = lambda_min(s.Htilde.adjoint() * s.Htilde);
        const double mf_leak = h2n * std::pow(correlation_coeff(s.h, h2), 2);
        for (std::size_t r = 0; r < R; ++r)
        {
            const double rho = rho_grid[r];
            const Precoder p = dvsinr_precoder(s.h, s.Htilde, rho);
            leak[r] += effective_gain(h2, p.w);

            // eigenvalues of D in the interference span are the B - 1 smallest
            const auto lam = d_eigvals(mu, rho);
            double tr_p = 0.0, tr_dd = 0.0;
            for (std::size_t k = 0; k < lam.size(); ++k)
            {
                tr_dd += lam[k] * lam[k];
                if (k >= lam.size() - span_dim)
                    tr_p += lam[k];
            }
            bound[r] += h2n * tr_p * tr_p / tr_dd;
            approx[r] += h2n / (static_cast<double>(eps) * std::pow(rho * lmin + 1.0, 2));
            mf[r] += mf_leak;
        }
    }
    const double n = static_cast<double>(samples);

    PropositionReport rep;
    rep.id = "prop4";
    rep.num_antennas = nt;
    rep.num_bs = num_bs;
    rep.samples = samples;
    for (std::size_t r = 0; r < R; ++r)
        rep.add("prop4-bound", rho_grid[r], leak[r] / n, bound[r] / n);
    for (std::size_t r = 0; r < R; ++r)
        rep.add("prop4-approx", rho_grid[r], leak[r] / n, approx[r] / n);
    for (std::size_t r = 0; r < R; ++r)
        rep.add("prop4-mf", rho_grid[r], leak[r] / n, mf[r] / n);

    for (std::size_t r = 0; r < R; ++r)
        if (!(bound[r] >= leak[r]))
            rep.failures.push_back("prop4: bound below empirical leakage at rho=" + std::to_string(rho_grid[r]));
    for (std::size_t r = 0; r < R; ++r)
        if (rho_grid[r] <= 1e-6 && rep.find("prop4-mf", rho_grid[r])->rel_error > 0.03)
            rep.failures.push_back("prop4: low-SNR leakage departs from matched filter at rho=" +
                                   std::to_string(rho_grid[r]));

    std::vector<double> xs, ys;
    for (std::size_t r = 0; r < R; ++r)
        if (rho_grid[r] >= 1e3 && rho_grid[r] <= 1e5)
        {
            xs.push_back(rho_grid[r]);
            ys.push_back(leak[r] / n);
        }
    if (xs.size() >= 2)
    {
        rep.slope = loglog_slope(xs, ys);
        if (!(std::abs(rep.slope + 2.0) <= kSlopeTolerance))
            rep.failures.push_back("prop4: high-SNR log-log slope " + std::to_string(rep.slope));
    }
    return rep;
}

/// Null-space projection against its inner-product approximation. Rows:
///   prop6-nsp    mean |Q h|^2 vs (eps / Nt) E|h|^2
///   prop6-nspa   mean NSPA metric vs (1 - 1/Nt)^(B-1) E|h|^2
///   prop6-ratio  mean NSPA / mean NSP vs the analytic ratio
inline PropositionReport check_prop6_nspa(std::size_t nt, std::size_t num_bs, std::size_t samples,
                                          std::uint64_t seed)
{
    require_power_limited(nt, num_bs, "check_prop6_nspa");
    const double ntd = static_cast<double>(nt);
    const double eps = static_cast<double>(null_dim(nt, num_bs));
    const double nsp_factor = eps / ntd;
    const double nspa_factor = std::pow(1.0 - 1.0 / ntd, static_cast<double>(num_bs - 1));

    double nsp = 0.0, nspa = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i)
    {
        const IidSample s = draw_iid_sample(nt, num_bs, seed, i);
        nsp += (projectors(s.Htilde).Q * s.h).squaredNorm();
        nspa += metric_nspa(s.h, s.Htilde);
        norm2 += s.h.squaredNorm();
    }
    const double n = static_cast<double>(samples);

    PropositionReport rep;
    rep.id = "prop6";
    rep.num_antennas = nt;
    rep.num_bs = num_bs;
    rep.samples = samples;
    rep.add("prop6-nsp", ntd, nsp / n, nsp_factor * norm2 / n);
    rep.add("prop6-nspa", ntd, nspa / n, nspa_factor * norm2 / n);
    rep.add("prop6-ratio", ntd, nspa / nsp, nspa_factor / nsp_factor);

    const double ratio_tol = num_bs == 2 ? 0.01 : 0.03;
    for (const auto &r : rep.rows)
    {
        const double tol = r.quantity == "prop6-ratio" ? ratio_tol : kMeanTolerance;
        if (r.rel_error > tol)
            rep.failures.push_back(r.quantity + ": relative error " + std::to_string(r.rel_error));
    }
    if (num_bs >= 3 && !(nspa > nsp))
        rep.failures.push_back("prop6: NSPA mean does not exceed NSP mean");
    return rep;
}

/// Accuracy of the projector metric with the heuristic alpha as an estimate
/// of the DVSINR effective gain. Rows:
///   alpha-error  mean |g - |h^H w|^2| / mean |h|^2 (predicted 0)
///   alpha-mean   mean alpha weight (predicted 0, informational)
/// Judged: error below 1% at rho <= 1e-6 and rho >= 1e6; alpha strictly
/// decreasing along the sorted grid on every sample.
inline PropositionReport check_alpha_heuristic(std::size_t nt, std::size_t num_bs, const std::vector<double> &rho_grid,
                                               std::size_t samples, std::uint64_t seed)
{
    require_power_limited(nt, num_bs, "check_alpha_heuristic");
    if (rho_grid.empty())
        throw Error("check_alpha_heuristic: empty SNR grid");
    std::vector<double> sorted = rho_grid;
    std::sort(sorted.begin(), sorted.end());

    const std::size_t R = sorted.size();
    std::vector<double> err(R, 0.0), alpha_sum(R, 0.0);
    double norm2 = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < samples; ++i)
    {
        const IidSample s = draw_iid_sample(nt, num_bs, seed, i);
        norm2 += s.h.squaredNorm();
        double prev = 2.0;
        for (std::size_t r = 0; r < R; ++r)
        {
            const double rho = sorted[r];
            const double alpha = alpha_weight(s.Htilde, rho);
            if (!(alpha < prev) && alpha > std::numeric_limits<double>::min())
                monotone = false;
            prev = alpha;
            alpha_sum[r] += alpha;
            const double g = metric_mus(s.h, s.Htilde, rho, PrecoderKind::DVSINR);
            const double truth = effective_gain(s.h, dvsinr_precoder(s.h, s.Htilde, rho).w);
            err[r] += std::abs(g - truth);
        }
    }
    const double n = static_cast<double>(samples);

    PropositionReport rep;
    rep.id = "alpha";
    rep.num_antennas = nt;
    rep.num_bs = num_bs;
    rep.samples = samples;
    for (std::size_t r = 0; r < R; ++r)
        rep.add("alpha-error", sorted[r], err[r] / norm2, 0.0);
    for (std::size_t r = 0; r < R; ++r)
        rep.add("alpha-mean", sorted[r], alpha_sum[r] / n, 0.0);

    for (std::size_t r = 0; r < R; ++r)
        if ((sorted[r] <= 1e-6 || sorted[r] >= 1e6) && !(err[r] / norm2 < kAlphaLimitTolerance))
            rep.failures.push_back("alpha: normalised error " + std::to_string(err[r] / norm2) +
                                   " at rho=" + std::to_string(sorted[r]));
    if (!monotone)
        rep.failures.push_back("alpha: weight not strictly decreasing in rho");
    return rep;
}

} // namespace cbf

#endif // CBF_ANALYSIS_HPP
