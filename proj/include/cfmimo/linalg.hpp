// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - uplink cell-free massive MIMO simulation library
// Copyright (C) 2026 The cfmimo authors
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

#pragma once

#include "errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>

namespace cfmimo
{

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// max |A - A^H| <= rel_tol * ||A||_F. The zero matrix is Hermitian.
inline bool is_hermitian(const CMatrix &A, double rel_tol = 1e-12)
{
    if (A.rows() != A.cols())
        return false;
    const double scale = A.norm();
    if (scale == 0.0)
        return true;
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

// Smallest eigenvalue >= -rel_tol * trace.
inline bool is_psd(const CMatrix &A, double rel_tol = 1e-10)
{
    if (!is_hermitian(A))
        return false;
    if (A.size() == 0)
        return true;
    const CMatrix H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
    const double tr = H.trace().real();
    return es.eigenvalues().minCoeff() >= -rel_tol * std::abs(tr);
}

/// Hermitian square root of a PSD matrix by eigendecomposition.
/// Negative eigenvalues (round-off on near-singular input) are clipped to zero,
/// so rank-deficient correlation matrices are accepted.
inline CMatrix psd_sqrt(const CMatrix &R)
{
    if (!is_hermitian(R))
        throw NumericDomainError("psd_sqrt: input matrix is not Hermitian");
    if (R.size() == 0 || R.norm() == 0.0)
        return CMatrix::Zero(R.rows(), R.cols());
    const CMatrix H = 0.5 * (R + R.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    const RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

// 2-norm condition number. Wide matrices (rows < cols) have no left inverse: +inf.
inline double condition_number(const CMatrix &A)
{
    if (A.rows() < A.cols())
        return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<CMatrix> svd(A);
    const RVector &s = svd.singularValues();
    if (s.size() == 0)
        return 1.0;
    const double lo = s(s.size() - 1);
    if (lo <= 0.0)
        return std::numeric_limits<double>::infinity();
    return s(0) / lo;
}

// Solve A X = B for Hermitian positive-definite A.
inline CMatrix hpd_solve(const CMatrix &A, const CMatrix &B)
{
    Eigen::LLT<CMatrix> llt(A);
    if (llt.info() != Eigen::Success)
        throw NumericDomainError("hpd_solve: matrix is not positive definite");
    return llt.solve(B);
}

} // namespace cfmimo
