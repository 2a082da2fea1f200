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
#include "linalg.hpp"
#include "random.hpp"
#include "scenario.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace cfmimo
{

// Gamma = p_u tau_p sum_{k' in P_k} R_k'l + sigma^2 I.
inline CMatrix pilot_gamma(const Scenario &scn, int k, int l)
{
    const int N = scn.N_a();
    CMatrix sum = CMatrix::Zero(N, N);
    for (int j : scn.copilot_sets[static_cast<std::size_t>(k)])
        sum += scn.R(j, l);
    const double pt = scn.config.p_u * scn.config.tau_p;
    return pt * sum + scn.sigma_z2 * CMatrix::Identity(N, N);
}

// Covariance of the LMMSE estimate: p_u tau_p R Gamma^-1 R.
inline CMatrix estimate_covariance(const CMatrix &R, const CMatrix &Gamma, double p_u, int tau_p)
{
    const CMatrix RG = hpd_solve(Gamma, R).adjoint(); // R Gamma^-1 (Gamma, R Hermitian)
    CMatrix phi = p_u * tau_p * RG * R;
    return 0.5 * (phi + phi.adjoint());
}

// Estimation error covariance: Theta = R - p_u tau_p R Gamma^-1 R.
inline CMatrix error_covariance(const CMatrix &R, const CMatrix &Gamma, double p_u, int tau_p)
{
    return R - estimate_covariance(R, Gamma, p_u, tau_p);
}

/// Per-scenario second-order statistics used by every coherence block.
/// Computed once; shared read-only across blocks and workers.
struct EstimationStatistics
{
    int K = 0;
    int L = 0;
    int N_a = 0;
    double p_u = 0.0;
    int tau_p = 1;
    double sigma_z2 = 0.0;
    std::vector<int> pilot_of;
    std::vector<std::vector<int>> copilot_sets;
    std::vector<CMatrix> gamma;     // Gamma_kl
    std::vector<CMatrix> theta;     // Theta_kl
    std::vector<CMatrix> sqrt_r;    // R_kl^(1/2)
    std::vector<CMatrix> estimator; // sqrt(p_u) R_kl Gamma_kl^-1

    std::size_t index(int k, int l) const { return static_cast<std::size_t>(k * L + l); }
    const CMatrix &Gamma(int k, int l) const { return gamma[index(k, l)]; }
    const CMatrix &Theta(int k, int l) const { return theta[index(k, l)]; }
};

using StatisticsPtr = std::shared_ptr<const EstimationStatistics>;

inline StatisticsPtr estimation_statistics(const Scenario &scn)
{
    auto st = std::make_shared<EstimationStatistics>();
    st->K = scn.K();
    st->L = scn.L();
    st->N_a = scn.N_a();
    st->p_u = scn.config.p_u;
    st->tau_p = scn.config.tau_p;
    st->sigma_z2 = scn.sigma_z2;
    st->pilot_of = scn.pilot_of;
    st->copilot_sets = scn.copilot_sets;
    const std::size_t n = static_cast<std::size_t>(st->K * st->L);
    st->gamma.resize(n);
    st->theta.resize(n);
    st->sqrt_r.resize(n);
    st->estimator.resize(n);
    for (int k = 0; k < st->K; ++k)
    {
        for (int l = 0; l < st->L; ++l)
        {
            const std::size_t i = st->index(k, l);
            const CMatrix &R = scn.R(k, l);
            st->gamma[i] = pilot_gamma(scn, k, l);
            st->theta[i] = error_covariance(R, st->gamma[i], st->p_u, st->tau_p);
            st->sqrt_r[i] = psd_sqrt(R);
            st->estimator[i] = std::sqrt(st->p_u) * hpd_solve(st->gamma[i], R).adjoint();
        }
    }
    return st;
}

/// One coherence-block realization.
///
/// h and h_hat are M x K with AP l occupying rows [l N_a, (l+1) N_a), so column k
/// is the stacked channel of user k. Theta and Gamma live in the shared statistics.
struct ChannelState
{
    CMatrix h;
    CMatrix h_hat;
    StatisticsPtr stats;
    std::uint64_t block_seed = 0;

    int K() const { return stats->K; }
    int L() const { return stats->L; }
    int N_a() const { return stats->N_a; }
    int M() const { return stats->L * stats->N_a; }

    auto h_kl(int k, int l) const { return h.block(l * N_a(), k, N_a(), 1); }
    auto h_hat_kl(int k, int l) const { return h_hat.block(l * N_a(), k, N_a(), 1); }
    // N_a x K local estimate matrix at AP l.
    auto h_hat_l(int l) const { return h_hat.block(l * N_a(), 0, N_a(), K()); }
    const CMatrix &Theta(int k, int l) const { return stats->Theta(k, l); }
    const CMatrix &Gamma(int k, int l) const { return stats->Gamma(k, l); }
};

// h = R^(1/2) w, w ~ CN(0, I).
inline CVector sample_channel(const CMatrix &R, Rng &rng)
{
    const CMatrix root = psd_sqrt(R);
    return root * complex_gaussian(R.rows(), rng);
}

/// Draws true channels and a despread pilot observation per (pilot, AP),
///   y_p = sqrt(p_u) tau_p sum_{k' in P} h_k'l + n,  n ~ CN(0, tau_p sigma^2 I),
/// and forms h_hat_kl = sqrt(p_u) R_kl Gamma_kl^-1 y_p. Co-pilot users share y_p.
inline ChannelState realize_block(const StatisticsPtr &stats, std::uint64_t block_seed)
{
    const auto &st = *stats;
    const int K = st.K, L = st.L, N = st.N_a;
    Rng rng = make_stream(block_seed, {0xb10cULL});

    ChannelState cs;
    cs.stats = stats;
    cs.block_seed = block_seed;
    cs.h.resize(L * N, K);
    cs.h_hat.resize(L * N, K);

    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
            cs.h.block(l * N, k, N, 1) = st.sqrt_r[st.index(k, l)] * complex_gaussian(N, rng);

    int n_pilots = 0;
    for (int p : st.pilot_of)
        n_pilots = std::max(n_pilots, p + 1);
    const double amp = std::sqrt(st.p_u) * st.tau_p;
    for (int t = 0; t < n_pilots; ++t)
    {
        for (int l = 0; l < L; ++l)
        {
            CVector y = complex_gaussian(N, rng, st.tau_p * st.sigma_z2);
            for (int k = 0; k < K; ++k)
                if (st.pilot_of[static_cast<std::size_t>(k)] == t)
                    y += amp * cs.h.block(l * N, k, N, 1);
            for (int k = 0; k < K; ++k)
                if (st.pilot_of[static_cast<std::size_t>(k)] == t)
                    cs.h_hat.block(l * N, k, N, 1) = st.estimator[st.index(k, l)] * y;
        }
    }
    return cs;
}

inline ChannelState realize_block(const Scenario &scn, Rng &rng)
{
    return realize_block(estimation_statistics(scn), rng());
}

} // namespace cfmimo
