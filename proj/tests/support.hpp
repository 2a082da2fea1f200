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

// Fixtures shared by the unit tests and the acceptance binary.

#pragma once

#include <cfmimo/cfmimo.hpp>

#include <cmath>
#include <memory>
#include <vector>

namespace cfmimo::testing
{

inline CMatrix random_cmatrix(Eigen::Index rows, Eigen::Index cols, Rng &rng, double variance = 1.0)
{
    CMatrix A(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        A.col(j) = complex_gaussian(rows, rng, variance);
    return A;
}

// Random Hermitian PSD matrix with trace ~ n * scale.
inline CMatrix random_psd(Eigen::Index n, Rng &rng, double scale = 1.0)
{
    const CMatrix G = random_cmatrix(n, n, rng);
    return scale * (G * G.adjoint()) / static_cast<double>(n);
}

inline double rel_frobenius(const CMatrix &A, const CMatrix &ref) { return (A - ref).norm() / ref.norm(); }

// Empirical second moment E[x x^H] of the columns of X.
inline CMatrix sample_covariance(const CMatrix &X) { return X * X.adjoint() / static_cast<double>(X.cols()); }

/// Scenario with hand-picked correlation matrices (K * L entries, k-major)
/// and noise power. Positions are left empty.
inline Scenario manual_scenario(int L, int N_a, int K, int tau_p, double p_u, double sigma_z2, std::vector<CMatrix> R)
{
    Scenario s;
    s.config.L = L;
    s.config.N_a = N_a;
    s.config.K = K;
    s.config.tau_p = tau_p;
    s.config.tau_u = 200 - tau_p;
    s.config.tau_c = 200;
    s.config.p_u = p_u;
    s.beta = RMatrix::Zero(K, L);
    s.correlation = std::move(R);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
            s.beta(k, l) = s.R(k, l).trace().real() / N_a;
    s.pilot_of = assign_pilots(K, tau_p);
    s.copilot_sets = copilot_sets(s.pilot_of);
    s.sigma_z2 = sigma_z2;
    return s;
}

/// Channel state built directly from an estimate matrix and error covariances,
/// bypassing the pilot phase. theta has K * L entries (k-major); empty means zero.
inline ChannelState synthetic_state(int L, int N_a, const CMatrix &h_hat, std::vector<CMatrix> theta, double p_u,
                                    double sigma_z2)
{
    auto st = std::make_shared<EstimationStatistics>();
    const int K = static_cast<int>(h_hat.cols());
    st->K = K;
    st->L = L;
    st->N_a = N_a;
    st->p_u = p_u;
    st->tau_p = 1;
    st->sigma_z2 = sigma_z2;
    st->pilot_of = assign_pilots(K, K);
    st->copilot_sets = copilot_sets(st->pilot_of);
    if (theta.empty())
        theta.assign(static_cast<std::size_t>(K * L), CMatrix::Zero(N_a, N_a));
    st->theta = std::move(theta);
    st->gamma.assign(static_cast<std::size_t>(K * L), CMatrix::Identity(N_a, N_a));
    ChannelState cs;
    cs.h = h_hat;
    cs.h_hat = h_hat;
    cs.stats = st;
    return cs;
}

// Random estimate matrix with random PSD error covariances of relative size theta_scale.
inline ChannelState random_state(int L, int N_a, int K, Rng &rng, double theta_scale = 0.1, double p_u = 1.0,
                                 double sigma_z2 = 0.1)
{
    const CMatrix H = random_cmatrix(L * N_a, K, rng);
    std::vector<CMatrix> theta;
    for (int i = 0; i < K * L; ++i)
        theta.push_back(random_psd(N_a, rng, theta_scale));
    return synthetic_state(L, N_a, H, std::move(theta), p_u, sigma_z2);
}

/// Direct per-user SINR of a centralized combiner,
///   p eta_k |d^H h_k|^2 / (p sum_{k'!=k} eta_k' |d^H h_k'|^2 + p sum_k' eta_k' d^H Theta_k' d + sigma^2 ||d||^2),
/// with Theta_k' assembled as a full block-diagonal M x M matrix.
inline RVector direct_sinr(const CMatrix &D, const ChannelState &s, const RVector &eta, double p_u, double sigma_z2)
{
    const int K = s.K(), L = s.L(), N = s.N_a(), M = s.M();
    std::vector<CMatrix> theta_full(static_cast<std::size_t>(K), CMatrix::Zero(M, M));
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
            theta_full[static_cast<std::size_t>(k)].block(l * N, l * N, N, N) = s.Theta(k, l);
    RVector g(K);
    for (int k = 0; k < K; ++k)
    {
        const CVector d = D.col(k);
        double interf = sigma_z2 * d.squaredNorm();
        for (int j = 0; j < K; ++j)
        {
            if (j != k)
                interf += p_u * eta(j) * std::norm(d.dot(s.h_hat.col(j)));
            interf += p_u * eta(j) * d.dot(theta_full[static_cast<std::size_t>(j)] * d).real();
        }
        g(k) = p_u * eta(k) * std::norm(d.dot(s.h_hat.col(k))) / interf;
    }
    return g;
}

// Random linearization with nonnegative coefficients and a zero B diagonal.
inline SinrLinearization random_linearization(int K, Rng &rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SinrLinearization lin;
    lin.a.resize(K);
    lin.B = RMatrix::Zero(K, K);
    lin.C = RMatrix::Zero(K, K);
    lin.n.resize(K);
    lin.q = RVector::Zero(K);
    for (int k = 0; k < K; ++k)
    {
        lin.a(k) = 0.5 + 4.0 * u(rng);
        lin.n(k) = 0.05 + 0.5 * u(rng);
        for (int j = 0; j < K; ++j)
        {
            if (j != k)
                lin.B(k, j) = 0.3 * u(rng);
            lin.C(k, j) = 0.05 * u(rng);
        }
    }
    return lin;
}

} // namespace cfmimo::testing
