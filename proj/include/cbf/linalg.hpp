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

#ifndef CBF_LINALG_HPP
#define CBF_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cbf/error.hpp"

namespace cbf
{

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Relative singular-value threshold below which a direction counts as null.
inline constexpr double kRankTolerance = 1e-10;

// Condition number of A^H A above which a projector is refused.
inline constexpr double kMaxGramCondition = 1e12;

struct NullSpace
{
    CMatrix basis;               // Nt x eps, orthonormal columns
    bool rank_ambiguous = false; // a singular value sat close to the threshold
};

// Orthonormal basis of { v : A^H v = 0 }, i.e. the orthogonal complement of
// the column span of A. Singular values below kRankTolerance * sigma_max are
// treated as zero; values within two decades of that threshold set
// rank_ambiguous and the smaller rank is kept.
inline NullSpace null_space_basis(const CMatrix &A)
{
    const Eigen::Index n = A.rows();
    if (n == 0)
        throw Error("null_space_basis: empty matrix");
    if (A.cols() == 0)
        return {CMatrix::Identity(n, n), false};

    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullU);
    const auto &sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;

    Eigen::Index rank = 0;
    bool ambiguous = false;
    const double thr = kRankTolerance * smax;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
    {
        if (smax > 0.0 && sv(i) > thr)
            ++rank;
        if (smax > 0.0 && sv(i) > 1e-2 * thr && sv(i) < 1e2 * thr)
            ambiguous = true;
    }

    NullSpace out;
    out.basis = svd.matrixU().rightCols(n - rank);
    out.rank_ambiguous = ambiguous;
    return out;
}

struct Projectors
{
    CMatrix P; // onto Sp(A)
    CMatrix Q; // onto Sp(A)^perp
};

// P = A (A^H A)^{-1} A^H, Q = I - P.
inline Projectors projectors(const CMatrix &A)
{
    const Eigen::Index n = A.rows();
    if (A.cols() == 0)
        return {CMatrix::Zero(n, n), CMatrix::Identity(n, n)};
    if (A.cols() > n)
        throw Error("projectors: more columns than rows");

    const CMatrix gram = A.adjoint() * A;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || !(lmin > 0.0) || lmax / lmin > kMaxGramCondition)
        throw Error("rank-deficient interference matrix");

    Projectors out;
    out.P = A * gram.llt().solve(A.adjoint());
    out.Q = CMatrix::Identity(n, n) - out.P;
    return out;
}

// Jain's fairness index (sum x)^2 / (n sum x^2), in [1/n, 1].
inline double jain_index(std::span<const double> x)
{
    if (x.empty())
        throw Error("jain_index: empty input");
    double s = 0.0, s2 = 0.0;
    for (double v : x)
    {
        if (v < 0.0 || !std::isfinite(v))
            throw Error("jain_index: entries must be finite and nonnegative");
        s += v;
        s2 += v * v;
    }
    if (s2 == 0.0)
        throw Error("undefined fairness");
    const double j = s * s / (static_cast<double>(x.size()) * s2);
    // rounding can push an all-equal vector a hair above 1
    return std::clamp(j, 1.0 / static_cast<double>(x.size()), 1.0);
}

// |<a,b>| / (|a| |b|)
inline double correlation_coeff(const CVector &a, const CVector &b)
{
    if (a.size() != b.size())
        throw Error("correlation_coeff: length mismatch");
    const double na = a.norm(), nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0))
        throw Error("correlation_coeff: zero vector");
    return std::min(1.0, std::abs(a.dot(b)) / (na * nb));
}

inline bool is_hermitian(const CMatrix &A, double tol = 1e-10)
{
    if (A.rows() != A.cols())
        return false;
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

// Eigenvalues of a Hermitian matrix, descending.
inline std::vector<double> hermitian_eigvals(const CMatrix &A)
{
    if (!is_hermitian(A))
        throw Error("hermitian_eigvals: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
    const auto &ev = es.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

inline double lambda_max(const CMatrix &A)
{
    return hermitian_eigvals(A).front();
}

inline double lambda_min(const CMatrix &A)
{
    return hermitian_eigvals(A).back();
}

inline double abs_det(const CMatrix &A)
{
    if (A.rows() != A.cols())
        throw Error("abs_det: matrix is not square");
    if (A.rows() == 0)
        return 1.0;
    return std::abs(A.fullPivLu().determinant());
}

// Solves C x = b for Hermitian positive-definite C.
inline CVector solve_hpd(const CMatrix &C, const CVector &b)
{
    Eigen::LLT<CMatrix> llt(C);
    if (llt.info() != Eigen::Success)
        throw Error("solve_hpd: matrix is not positive definite");
    return llt.solve(b);
}

} // namespace cbf

#endif // CBF_LINALG_HPP
