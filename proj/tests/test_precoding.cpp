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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cbf/precoding.hpp"
#include "test_util.hpp"

using namespace cbf;
using cbf::testing::Rng;

namespace
{

CVector v2(cplx a, cplx b)
{
    CVector v(2);
    v << a, b;
    return v;
}

const double kS = 1.0 / std::sqrt(2.0);

// B = 2, Nt = 2, K = 1, each BS sees its own user on e1 and the other
// user on (1, 1) / sqrt(2).
ChannelRealization mirrored_pair()
{
    ChannelRealization r(2, 2, 1);
    r.h(0, 0) = v2(1.0, 0.0);
    r.h(0, 1) = v2(kS, kS);
    r.h(1, 1) = v2(1.0, 0.0);
    r.h(1, 0) = v2(kS, kS);
    return r;
}

} // namespace

TEST(Dzf, NullSpaceIsSecondAxis)
{
    CMatrix Ht(2, 1);
    Ht << 1.0, 0.0;
    const Precoder p = dzf_precoder(v2(kS, kS), Ht);
    EXPECT_NEAR(std::abs(p.w(0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.w(1) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(effective_gain(v2(kS, kS), p.w), 0.5, 1e-15);
    EXPECT_EQ(p.kind, PrecoderKind::DZF);
}

TEST(Dzf, ChannelInsideNullSpaceIsMatchedFilter)
{
    CVector h(3);
    h << cplx(1.0, 2.0), cplx(-0.5, 0.3), 0.0;
    CMatrix Ht = CMatrix::Zero(3, 1);
    Ht(2, 0) = 1.0;
    const Precoder p = dzf_precoder(h, Ht);
    EXPECT_LT((p.w - h / h.norm()).norm(), 1e-12);
    EXPECT_NEAR(effective_gain(h, p.w), h.squaredNorm(), 1e-12);
}

TEST(Dzf, MatchesProjectorForm)
{
    Rng rng(31);
    for (int t = 0; t < 500; ++t)
    {
        const CVector h = rng.vec(4);
        const CMatrix Ht = rng.mat(4, 2);
        const CVector qh = projectors(Ht).Q * h;
        EXPECT_LT((dzf_precoder(h, Ht).w - qh / qh.norm()).norm(), 1e-9);
    }
}

TEST(Dzf, UndefinedWhenNullSpaceEmpty)
{
    Rng rng(32);
    try
    {
        dzf_precoder(rng.vec(2), rng.mat(2, 2));
        FAIL() << "expected an error";
    }
    catch (const Error &e)
    {
        EXPECT_NE(std::string(e.what()).find("DZF undefined"), std::string::npos);
    }
}

TEST(Dzf, ChannelInsideInterferenceSpanRejected)
{
    Rng rng(33);
    const CMatrix Ht = rng.mat(3, 2);
    const CVector h = Ht.col(0) * cplx(0.3, 1.0) + Ht.col(1);
    try
    {
        dzf_precoder(h, Ht);
        FAIL() << "expected an error";
    }
    catch (const Error &e)
    {
        EXPECT_STREQ(e.what(), "zero effective channel");
    }
}

TEST(Dvsinr, HandEvaluatedInstance)
{
    // C = I + u u^H with u = (1, 1)/sqrt 2, D = C^{-1} = [[.75, -.25], [-.25, .75]]
    CMatrix Ht(2, 1);
    Ht << kS, kS;
    const CVector h = v2(1.0, 0.0);
    const Precoder p = dvsinr_precoder(h, Ht, 1.0);
    EXPECT_NEAR(p.w(0).real(), 3.0 / std::sqrt(10.0), 1e-12);
    EXPECT_NEAR(p.w(1).real(), -1.0 / std::sqrt(10.0), 1e-12);
    EXPECT_NEAR(p.w(0).real(), 0.94868, 1e-5);
    EXPECT_NEAR(p.w(1).real(), -0.31623, 1e-5);
    EXPECT_NEAR(effective_gain(h, p.w), 0.9, 1e-12);
    EXPECT_EQ(p.kind, PrecoderKind::DVSINR);
    EXPECT_DOUBLE_EQ(p.rho, 1.0);
}

TEST(Dvsinr, OrthogonalChannelIsMatchedFilter)
{
    CVector h(3);
    h << cplx(0.0, 1.0), cplx(2.0, 0.0), 0.0;
    CMatrix Ht = CMatrix::Zero(3, 2);
    Ht(2, 0) = 1.0;
    Ht(2, 1) = cplx(0.0, 3.0);
    for (double rho : {1e-3, 1.0, 1e6})
        EXPECT_LT((dvsinr_precoder(h, Ht, rho).w - h / h.norm()).norm(), 1e-12);
}

TEST(Dvsinr, LowSnrLimitIsMatchedFilter)
{
    Rng rng(34);
    for (int t = 0; t < 100; ++t)
    {
        const CVector h = rng.vec(3);
        EXPECT_LT((dvsinr_precoder(h, rng.mat(3, 2), 1e-9).w - h / h.norm()).norm(), 1e-7);
    }
}

TEST(Dvsinr, RejectsBadSnr)
{
    EXPECT_THROW(dvsinr_precoder(CVector::Ones(2), CMatrix::Ones(2, 1), 0.0), Error);
    EXPECT_THROW(dvsinr_precoder(CVector::Ones(2), CMatrix::Ones(2, 1), -1.0), Error);
}

TEST(PrecoderInvariants, RandomInstances)
{
    Rng rng(35);
    for (int t = 0; t < 2000; ++t)
    {
        const Eigen::Index nt = 2 + t % 5;
        const Eigen::Index m = 1 + t % nt; // up to Nt columns
        const CVector h = rng.vec(nt);
        const CMatrix Ht = rng.mat(nt, m);
        const double rho = std::pow(10.0, rng.uniform(-3.0, 6.0));

        const Precoder v = dvsinr_precoder(h, Ht, rho);
        EXPECT_LT(std::abs(v.w.norm() - 1.0), 1e-12);
        const cplx hv = h.dot(v.w);
        EXPECT_LT(std::abs(hv.imag()), 1e-10);
        EXPECT_GT(hv.real(), 0.0);
        const double gv = effective_gain(h, v.w);
        EXPECT_LE(gv, h.squaredNorm() * (1.0 + 1e-12));

        if (m >= nt)
            continue;
        const Precoder z = dzf_precoder(h, Ht);
        EXPECT_LT(std::abs(z.w.norm() - 1.0), 1e-12);
        const cplx hz = h.dot(z.w);
        EXPECT_LT(std::abs(hz.imag()), 1e-10);
        EXPECT_GE(hz.real(), 0.0);
        for (Eigen::Index j = 0; j < m; ++j)
            EXPECT_LT(effective_gain(Ht.col(j), z.w), 1e-18);

        const double nsp = (projectors(Ht).Q * h).squaredNorm();
        const CMatrix V = null_space_basis(Ht).basis;
        double cos2 = 0.0;
        for (Eigen::Index i = 0; i < V.cols(); ++i)
            cos2 += std::pow(correlation_coeff(h, V.col(i)), 2);
        EXPECT_NEAR(effective_gain(h, z.w), nsp, 1e-9);
        EXPECT_NEAR(effective_gain(h, z.w), h.squaredNorm() * cos2, 1e-9);
        EXPECT_GE(gv, nsp * (1.0 - 1e-9));
    }
}

TEST(PrecoderInvariants, DvsinrApproachesDzfAtHighSnr)
{
    Rng rng(36);
    for (int t = 0; t < 500; ++t)
    {
        const Eigen::Index nt = 3 + t % 4;
        const CVector h = rng.vec(nt);
        const CMatrix Ht = rng.mat(nt, 2);
        const double gz = effective_gain(h, dzf_precoder(h, Ht).w);
        const double gv = effective_gain(h, dvsinr_precoder(h, Ht, 1e8).w);
        EXPECT_LT(std::abs(gv - gz) / gz, 1e-3);
    }
}

TEST(LinkBudget, DzfHasNoInterference)
{
    NetworkConfig c;
    c.num_bs = 3;
    c.num_antennas = 4;
    c.users_per_bs = 2;
    const ChannelRealization r = deploy(c, 5);
    const CandidateSet s{{1, 2, 5}, 0};
    const auto lb = link_budgets(r, s, PrecoderKind::DZF, 10.0);
    ASSERT_EQ(lb.size(), 3u);
    for (std::size_t b = 0; b < 3; ++b)
    {
        for (double i : lb[b].interference)
            EXPECT_LT(i, 1e-18);
        EXPECT_NEAR(lb[b].sinr, 10.0 * lb[b].signal, 1e-12 * lb[b].sinr);
        EXPECT_DOUBLE_EQ(lb[b].rate, std::log2(1.0 + lb[b].sinr));
    }
}

TEST(LinkBudget, MirroredPairByHand)
{
    // w = (3, -1)/sqrt 10 at both BSs: signal 0.9, leakage |(3 - 1)/sqrt 20|^2 = 0.2
    const ChannelRealization r = mirrored_pair();
    const CandidateSet s{{0, 1}, 0};
    const auto lb = link_budgets(r, s, PrecoderKind::DVSINR, 1.0);
    for (std::size_t b = 0; b < 2; ++b)
    {
        EXPECT_NEAR(lb[b].signal, 0.9, 1e-12);
        EXPECT_NEAR(lb[b].interference[1 - b], 0.2, 1e-12);
        EXPECT_EQ(lb[b].interference[b], 0.0);
        EXPECT_NEAR(lb[b].sinr, 0.9 / 1.2, 1e-12);
    }
    EXPECT_NEAR(sum_rate(lb), 2.0 * std::log2(1.75), 1e-12);
    EXPECT_NEAR(lb[0].rate, lb[1].rate, 1e-15);
}

TEST(LinkBudget, LeakageFallsAsInverseSquareSnr)
{
    Rng rng(37);
    ChannelRealization r(2, 3, 1);
    for (std::size_t b = 0; b < 2; ++b)
        for (UserIndex k = 0; k < 2; ++k)
            r.h(b, k) = rng.vec(3);
    const CandidateSet s{{0, 1}, 0};
    const auto lo = link_budgets(r, s, PrecoderKind::DVSINR, 1e5);
    const auto hi = link_budgets(r, s, PrecoderKind::DVSINR, 1e6);
    for (std::size_t b = 0; b < 2; ++b)
    {
        const double ratio = lo[b].interference[1 - b] / hi[b].interference[1 - b];
        EXPECT_NEAR(ratio, 100.0, 1.0);
    }
}

TEST(SumRate, Examples)
{
    std::vector<LinkBudget> zero(3), one(3);
    for (auto &lb : one)
        lb.sinr = 1.0;
    EXPECT_DOUBLE_EQ(sum_rate(zero), 0.0);
    EXPECT_DOUBLE_EQ(sum_rate(one), 3.0);
}

TEST(PrecoderKindNames, RoundTrip)
{
    EXPECT_EQ(parse_precoder_kind("DZF"), PrecoderKind::DZF);
    EXPECT_EQ(parse_precoder_kind("dvsinr"), PrecoderKind::DVSINR);
    EXPECT_EQ(to_string(PrecoderKind::DVSINR), "DVSINR");
    EXPECT_THROW(parse_precoder_kind("MMSE"), ConfigError);
}
