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


#ifndef CBF_METRICS_HPP
#define CBF_METRICS_HPP

#include <cmath>
#include <cstdio>
#include <limits>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cbf/error.hpp"
#include "cbf/linalg.hpp"
#include "cbf/precoding.hpp"

namespace cbf
{

enum class MetricKind
{
    MUS,  // projector metric, Nt >= B
    MUS2, // norm/volume metric, Nt < B
    NSPA  // inner-product approximation of the null-space projection
};

inline std::string to_string(MetricKind k)
{
    switch (k)
    {
    case MetricKind::MUS: return "MUS";
    case MetricKind::MUS2: return "MUS2";
    case MetricKind::NSPA: return "NSPA";
    }
    return "?";
}

/// What BS b reports to the CU for set l. This triple is the only backhaul
/// payload besides the shared set catalogue.
struct SelectionMetric
{
    std::size_t b = 0;
    std::size_t l = 0;
    double value = 0.0;
    MetricKind kind = MetricKind::MUS;
};

// 1 / (rho lambda_max(H~^H H~) + 1)^2, in (0, 1].
inline double alpha_weight(const CMatrix &Htilde, double rho)
{
    if (!(rho > 0.0))
        throw Error("alpha_weight: rho must be positive");
    if (Htilde.cols() == 0)
        return 1.0;
    const double lmax = std::max(0.0, lambda_max(Htilde.adjoint() * Htilde));
    const double a = 1.0 / std::pow(rho * lmax + 1.0, 2);
    // underflow would leave the (0, 1] range
    return std::max(a, std::numeric_limits<double>::min());
}

// |Q h|^2 + alpha |P h|^2 for an explicit alpha.
inline double metric_mus_weighted(const CVector &h, const CMatrix &Htilde, double alpha)
{
    if (Htilde.cols() >= h.size())
        throw Error("metric_mus needs Nt >= B: use metric_mus2 or metric_nspa");
    const Projectors pr = projectors(Htilde);
    const double q = (pr.Q * h).squaredNorm();
    const double p = (pr.P * h).squaredNorm();
    return q + alpha * p;
}

/// Projector metric. DZF reports the null-space projection |Q h|^2; DVSINR
/// adds the in-span energy weighted by alpha_weight.
inline double metric_mus(const CVector &h, const CMatrix &Htilde, double rho, PrecoderKind kind)
{
    const double alpha = kind == PrecoderKind::DZF ? 0.0 : alpha_weight(Htilde, rho);
    return metric_mus_weighted(h, Htilde, alpha);
}

// Volume spanned by the columns: the product of the nonzero squared singular
// values, i.e. det of the smaller of H^H H and H H^H.
inline double gram_volume(const CMatrix &H)
{
    return H.cols() <= H.rows() ? abs_det(H.adjoint() * H) : abs_det(H * H.adjoint());
}

// |h|^2 over the geometric mean of the interferers' squared norms.
inline double strength_ratio(const CVector &h, const CMatrix &Htilde)
{
    if (Htilde.cols() == 0)
        return 1.0;
    double log_sum = 0.0;
    for (Eigen::Index j = 0; j < Htilde.cols(); ++j)
    {
        const double n2 = Htilde.col(j).squaredNorm();
        if (!(n2 > 0.0))
            throw Error("metric_mus2: zero-norm interferer channel");
        log_sum += std::log(n2);
    }
    const double h2 = h.squaredNorm();
    if (!(h2 > 0.0))
        throw Error("metric_mus2: zero-norm intended channel");
    return std::exp(std::log(h2) - log_sum / static_cast<double>(Htilde.cols()));
}

// Volume of H over det(rho^{-1} I + H~ H~^H).
inline double spatial_compatibility(const CMatrix &H_full, const CMatrix &Htilde, double rho)
{
    CMatrix C = Htilde * Htilde.adjoint();
    C.diagonal().array() += 1.0 / rho;
    return gram_volume(H_full) / abs_det(C);
}

/// Interference-limited metric |h|^2 (alpha + (1 - alpha) M zeta).
inline double metric_mus2(const CVector &h, const CMatrix &H_full, const CMatrix &Htilde, double rho)
{
    if (!(rho > 0.0))
        throw Error("metric_mus2: rho must be positive");
    if (H_full.rows() != h.size() || Htilde.rows() != h.size() || H_full.cols() != Htilde.cols() + 1)
        throw Error("metric_mus2: dimension mismatch");
    const double m = strength_ratio(h, Htilde);
    const double zeta = spatial_compatibility(H_full, Htilde, rho);
    const double alpha = alpha_weight(Htilde, rho);
    return h.squaredNorm() * (alpha + (1.0 - alpha) * m * zeta);
}

/// |h|^2 prod_i (1 - eta(h, h_i)^2) over the cochannel columns.
inline double metric_nspa(const CVector &h, const CMatrix &cochannels)
{
    if (cochannels.rows() != h.size())
        throw Error("metric_nspa: dimension mismatch");
    double g = h.squaredNorm();
    for (Eigen::Index i = 0; i < cochannels.cols(); ++i)
    {
        const double eta = correlation_coeff(h, cochannels.col(i));
        g *= std::max(0.0, 1.0 - eta * eta);
    }
    return g;
}

inline double metric_nspa(const CVector &h, std::span<const CVector> cochannels)
{
    CMatrix m(h.size(), static_cast<Eigen::Index>(cochannels.size()));
    for (std::size_t i = 0; i < cochannels.size(); ++i)
        m.col(static_cast<Eigen::Index>(i)) = cochannels[i];
    return metric_nspa(h, m);
}

inline void write_metric_reports(std::ostream &os, std::span<const SelectionMetric> reports)
{
    os << "b,l,value\n";
    char buf[96];
    for (const auto &r : reports)
    {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", r.b, r.l, r.value);
        os << buf;
    }
}

inline std::vector<SelectionMetric> read_metric_reports(std::istream &is, MetricKind kind)
{
    std::vector<SelectionMetric> out;
    std::string line;
    if (!std::getline(is, line) || line != "b,l,value")
        throw Error("metric report: missing header");
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        SelectionMetric m;
        char c1 = 0, c2 = 0;
        if (!(ls >> m.b >> c1 >> m.l >> c2 >> m.value) || c1 != ',' || c2 != ',')
            throw Error("metric report: malformed line '" + line + "'");
        if (!(m.value >= 0.0) || !std::isfinite(m.value))
            throw Error("metric report: value must be finite and nonnegative");
        m.kind = kind;
        out.push_back(m);
    }
    return out;
}

} // namespace cbf

#endif // CBF_METRICS_HPP
