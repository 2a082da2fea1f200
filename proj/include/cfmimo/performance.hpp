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

#include "channel.hpp"
#include "combining.hpp"
#include "errors.hpp"
#include "linalg.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cfmimo
{

/// SINR written as a ratio in the power vector:
///
///   gamma_k(eta) = eta_k a_k / ( sum_{k' != k} eta_k' (B_kk' + C_kk') + eta_k C_kk - eta_k^2 q_k + n_k )
///
/// Centralized combining gives q = 0 and an exactly linear form. The distributed
/// SINR in its as-printed form carries a self term quadratic in eta_k, held in q.
/// B has a zero diagonal.
struct SinrLinearization
{
    RVector a;
    RMatrix B;
    RMatrix C;
    RVector n;
    RVector q;

    int users() const { return static_cast<int>(a.size()); }
    bool linear() const { return q.size() == 0 || (q.array() == 0.0).all(); }

    // Denominator of user k at power vector eta.
    double interference(int k, const RVector &eta) const
    {
        double den = n(k) + eta(k) * C(k, k);
        if (q.size() != 0)
            den -= eta(k) * eta(k) * q(k);
        for (int j = 0; j < users(); ++j)
            if (j != k)
                den += eta(j) * (B(k, j) + C(k, j));
        return den;
    }
};

/// Coefficients of the instantaneous SINR for a centralized combiner set:
/// a_k = |d_k^H h_hat_k|^2, B_kk' = |d_k^H h_hat_k'|^2, C_kk' = d_k^H Theta_k' d_k,
/// n_k = (sigma^2 / p_u) ||d_k||^2.
inline SinrLinearization linearize_sinr(const CombinerSet &comb, const ChannelState &s, double p_u, double sigma_z2)
{
    if (!comb.kind.centralized())
        throw ParameterError("linearize_sinr: expects a centralized combiner set");
    const int K = s.K(), L = s.L(), N = s.N_a();
    SinrLinearization lin;
    lin.a.resize(K);
    lin.B = RMatrix::Zero(K, K);
    lin.C = RMatrix::Zero(K, K);
    lin.n.resize(K);
    lin.q = RVector::Zero(K);

    const CMatrix G = comb.vectors.adjoint() * s.h_hat; // G(k, k') = d_k^H h_hat_k'
    for (int k = 0; k < K; ++k)
    {
        lin.a(k) = std::norm(G(k, k));
        for (int j = 0; j < K; ++j)
            if (j != k)
                lin.B(k, j) = std::norm(G(k, j));
        lin.n(k) = sigma_z2 / p_u * comb.vectors.col(k).squaredNorm();
        for (int l = 0; l < L; ++l)
        {
            const CVector dkl = comb.vectors.block(l * N, k, N, 1);
            for (int j = 0; j < K; ++j)
                lin.C(k, j) += std::max(0.0, dkl.dot(s.Theta(j, l) * dkl).real());
        }
    }
    return lin;
}

// Per-user gamma_k(eta). Users with eta_k = 0 get exactly 0.
inline RVector centralized_sinr(const SinrLinearization &lin, const RVector &eta)
{
    const int K = lin.users();
    if (eta.size() != K)
        throw ParameterError("centralized_sinr: power vector length mismatch");
    RVector g(K);
    for (int k = 0; k < K; ++k)
        g(k) = eta(k) == 0.0 ? 0.0 : eta(k) * lin.a(k) / lin.interference(k, eta);
    return g;
}

enum class Eq12Form
{
    as_printed, // per-AP second moments, subtracted term eta_k^2 sum_l |E[v^H h]|^2
    standard    // use-and-then-forget: coherent second moment of the AP sum
};

/// Sample moments of the local-combining SINR terms over channel realizations.
/// Indexing: m1(k, l); m2 / e2 flattened as (k * K + k') * L + l; m2_sum(k, k').
struct DistributedMoments
{
    int K = 0;
    int L = 0;
    CMatrix m1;              // E[v_kl^H h_hat_kl]
    std::vector<double> m2;  // E[|v_kl^H h_hat_k'l|^2]
    std::vector<double> e2;  // E[v_kl^H Theta_k'l v_kl]
    RMatrix nv;              // E[||v_kl||^2]
    RMatrix m2_sum;          // E[|sum_l v_kl^H h_hat_k'l|^2]
    int n_samples = 0;

    std::size_t idx(int k, int kp, int l) const { return static_cast<std::size_t>((k * K + kp) * L + l); }
    double M2(int k, int kp, int l) const { return m2[idx(k, kp, l)]; }
    double E2(int k, int kp, int l) const { return e2[idx(k, kp, l)]; }
};

namespace detail
{

inline void accumulate_moments(DistributedMoments &mom, const CombinerSet &v, const ChannelState &s)
{
    const int K = s.K(), L = s.L(), N = s.N_a();
    CMatrix coherent = CMatrix::Zero(K, K);
    for (int l = 0; l < L; ++l)
    {
        const CMatrix Vl = v.vectors.middleRows(l * N, N);
        const CMatrix Hl = s.h_hat_l(l);
        const CMatrix G = Vl.adjoint() * Hl; // G(k, k') = v_kl^H h_hat_k'l
        coherent += G;
        for (int k = 0; k < K; ++k)
        {
            const CVector vk = Vl.col(k);
            mom.m1(k, l) += G(k, k);
            mom.nv(k, l) += vk.squaredNorm();
            for (int j = 0; j < K; ++j)
            {
                mom.m2[mom.idx(k, j, l)] += std::norm(G(k, j));
                mom.e2[mom.idx(k, j, l)] += std::max(0.0, vk.dot(s.Theta(j, l) * vk).real());
            }
        }
    }
    mom.m2_sum += coherent.cwiseAbs2();
}

} // namespace detail

/// Averages the distributed-SINR expectation terms over n_blocks fresh
/// realizations. Block b uses the stream keyed by (seed, b). Local MMSE
/// vectors are rebuilt per block with the given eta.
inline DistributedMoments estimate_distributed_moments(const StatisticsPtr &stats, CombinerKind kind, const RVector &eta,
                                                       int n_blocks, std::uint64_t seed)
{
    if (kind.centralized())
        throw ParameterError("estimate_distributed_moments: expects a local combiner kind");
    if (n_blocks < 1)
        throw ParameterError("estimate_distributed_moments: n_blocks must be >= 1");
    const int K = stats->K, L = stats->L;
    DistributedMoments mom;
    mom.K = K;
    mom.L = L;
    mom.m1 = CMatrix::Zero(K, L);
    mom.m2.assign(static_cast<std::size_t>(K * K * L), 0.0);
    mom.e2.assign(static_cast<std::size_t>(K * K * L), 0.0);
    mom.nv = RMatrix::Zero(K, L);
    mom.m2_sum = RMatrix::Zero(K, K);

    for (int b = 0; b < n_blocks; ++b)
    {
        Rng block_rng = make_stream(seed, {static_cast<std::uint64_t>(b)});
        const ChannelState s = realize_block(stats, block_rng());
        const CombinerSet v = build_combiners(kind, s, eta);
        detail::accumulate_moments(mom, v, s);
    }
    const double inv = 1.0 / n_blocks;
    mom.m1 *= inv;
    for (auto &x : mom.m2)
        x *= inv;
    for (auto &x : mom.e2)
        x *= inv;
    mom.nv *= inv;
    mom.m2_sum *= inv;
    mom.n_samples = n_blocks;
    return mom;
}

inline DistributedMoments estimate_distributed_moments(const Scenario &scn, CombinerKind kind, const RVector &eta, int n_blocks,
                                                       Rng &rng)
{
    return estimate_distributed_moments(estimation_statistics(scn), kind, eta, n_blocks, rng());
}

/// Coefficients of the distributed SINR in the same ratio form as the centralized one.
///
/// as_printed: a_k = |sum_l m1|^2, B_kk' = sum_l m2(k,k',l), C_kk' = sum_l e2(k,k',l),
///             C_kk = sum_l (m2(k,k,l) + e2(k,k,l)), q_k = sum_l |m1(k,l)|^2.
/// standard:   B_kk' = m2_sum(k,k'), C_kk = sum_l e2(k,k,l) + m2_sum(k,k) - a_k, q = 0.
inline SinrLinearization linearize_distributed(const DistributedMoments &mom, double p_u, double sigma_z2,
                                               Eq12Form form = Eq12Form::as_printed)
{
    const int K = mom.K, L = mom.L;
    SinrLinearization lin;
    lin.a.resize(K);
    lin.B = RMatrix::Zero(K, K);
    lin.C = RMatrix::Zero(K, K);
    lin.n.resize(K);
    lin.q = RVector::Zero(K);
    for (int k = 0; k < K; ++k)
    {
        lin.a(k) = std::norm(mom.m1.row(k).sum());
        lin.n(k) = sigma_z2 / p_u * mom.nv.row(k).sum();
        for (int j = 0; j < K; ++j)
        {
            double m2 = 0.0, e2 = 0.0;
            for (int l = 0; l < L; ++l)
            {
                m2 += mom.M2(k, j, l);
                e2 += mom.E2(k, j, l);
            }
            if (form == Eq12Form::as_printed)
            {
                if (j == k)
                {
                    lin.C(k, k) = m2 + e2;
                    lin.q(k) = mom.m1.row(k).cwiseAbs2().sum();
                }
                else
                {
                    lin.B(k, j) = m2;
                    lin.C(k, j) = e2;
                }
            }
            else
            {
                if (j == k)
                    lin.C(k, k) = e2 + std::max(0.0, mom.m2_sum(k, k) - lin.a(k));
                else
                {
                    lin.B(k, j) = mom.m2_sum(k, j);
                    lin.C(k, j) = e2;
                }
            }
        }
    }
    return lin;
}

/// Distributed SINR evaluated term by term from the moments.
/// Throws MomentInconsistencyError when a denominator is not positive.
inline RVector distributed_sinr(const DistributedMoments &mom, const RVector &eta, double p_u, double sigma_z2,
                                Eq12Form form = Eq12Form::as_printed)
{
    const int K = mom.K, L = mom.L;
    if (eta.size() != K)
        throw ParameterError("distributed_sinr: power vector length mismatch");
    RVector g(K);
    for (int k = 0; k < K; ++k)
    {
        const cplx coherent = mom.m1.row(k).sum();
        const double num = eta(k) * std::norm(coherent);
        double den = sigma_z2 / p_u * mom.nv.row(k).sum();
        for (int j = 0; j < K; ++j)
        {
            double e2 = 0.0;
            for (int l = 0; l < L; ++l)
                e2 += mom.E2(k, j, l);
            if (form == Eq12Form::as_printed)
            {
                double m2 = 0.0;
                for (int l = 0; l < L; ++l)
                    m2 += mom.M2(k, j, l);
                den += eta(j) * (m2 + e2);
            }
            else
            {
                den += eta(j) * (mom.m2_sum(k, j) + e2);
            }
        }
        if (form == Eq12Form::as_printed)
            den -= eta(k) * eta(k) * mom.m1.row(k).cwiseAbs2().sum();
        else
            den -= eta(k) * std::norm(coherent);
        if (!(den > 0.0))
            throw MomentInconsistencyError("distributed_sinr: non-positive denominator for user " + std::to_string(k) +
                                           " (too few samples?)");
        g(k) = num / den;
    }
    return g;
}

enum class Prelog
{
    as_printed,  // 1 - tau_p / tau_u
    conventional // 1 - tau_p / tau_c
};

inline double prelog_factor(int tau_p, int tau_u, Prelog form = Prelog::as_printed)
{
    if (form == Prelog::as_printed)
    {
        if (tau_p >= tau_u)
            throw ParameterError("spectral_efficiency: as-printed prelog needs tau_p < tau_u");
        return 1.0 - static_cast<double>(tau_p) / tau_u;
    }
    return 1.0 - static_cast<double>(tau_p) / (tau_p + tau_u);
}

// Bits per channel use for one SINR value.
inline double spectral_efficiency(double gamma, int tau_p, int tau_u, Prelog form = Prelog::as_printed)
{
    if (gamma < 0.0)
        throw ParameterError("spectral_efficiency: negative SINR");
    return prelog_factor(tau_p, tau_u, form) * std::log2(1.0 + gamma);
}

} // namespace cfmimo
