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

#include "combining.hpp"
#include "errors.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <vector>

namespace cfmimo
{

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational &r) { return boost::rational_cast<double>(r); }

struct CostQuery
{
    CombinerKind method;
    std::int64_t M = 0;
    std::int64_t K = 0;
    std::int64_t L = 0;
    std::int64_t N_a = 0;
    std::int64_t tau_p = 0;
    std::int64_t tau_u = 0;

    void validate() const
    {
        if (M <= 0 || K <= 0 || L <= 0 || N_a <= 0 || tau_u < 1 || tau_p < 0)
            throw ParameterError("CostQuery: dimensions must be positive");
        if (M != L * N_a)
            throw ParameterError("CostQuery: M must equal L * N_a");
    }
};

/// Complex multiplications per channel use. Per-block setup work is spread
/// over the tau_u data symbols; detection costs K M per channel use.
///
///   MR, local MR        K M
///   ZF, RZF             (2 K^2 M + K^3) / tau_u + K M
///   MMSE                (M^3 + 2 K M^2) / tau_u + K M
///   local ZF, RZF       (2 K^2 M + K^3 L) / tau_u + K M
///   local MMSE          (M N_a^2 + 2 K M N_a) / tau_u + K M
///
/// Channel estimation is not counted.
inline Rational complexity(const CostQuery &q)
{
    q.validate();
    const auto M = q.M, K = q.K, L = q.L, N = q.N_a;
    const Rational detect(K * M);
    std::int64_t per_block = 0;
    if (q.method.centralized())
    {
        switch (q.method.scheme)
        {
        case Scheme::mr: per_block = 0; break;
        case Scheme::zf:
        case Scheme::rzf: per_block = 2 * K * K * M + K * K * K; break;
        case Scheme::mmse: per_block = M * M * M + 2 * K * M * M; break;
        }
    }
    else
    {
        switch (q.method.scheme)
        {
        case Scheme::mr: per_block = 0; break;
        case Scheme::zf:
        case Scheme::rzf: per_block = 2 * K * K * M + K * K * K * L; break;
        case Scheme::mmse: per_block = M * N * N + 2 * K * M * N; break;
        }
    }
    return Rational(per_block, q.tau_u) + detect;
}

/// Complex scalars per coherence block on the fronthaul.
/// Centralized: every AP forwards raw pilot and data samples, L N_a (tau_p + tau_u).
/// Distributed: every AP forwards one soft estimate per user and data symbol, L K tau_u.
inline std::int64_t fronthaul(Processing processing, std::int64_t L, std::int64_t N_a, std::int64_t K, std::int64_t tau_p,
                              std::int64_t tau_u)
{
    if (L <= 0 || N_a <= 0 || K <= 0 || tau_p < 0 || tau_u <= 0)
        throw ParameterError("fronthaul: arguments must be positive");
    return processing == Processing::centralized ? L * N_a * (tau_p + tau_u) : L * K * tau_u;
}

struct CostRecord
{
    CombinerKind method;
    Rational complexity;
    std::int64_t fronthaul = 0;
};

// All eight combiners at one operating point, in table order.
inline std::vector<CostRecord> cost_table(std::int64_t L, std::int64_t N_a, std::int64_t K, std::int64_t tau_p, std::int64_t tau_u)
{
    std::vector<CostRecord> rows;
    for (const auto kind : all_combiners())
    {
        const CostQuery q{kind, L * N_a, K, L, N_a, tau_p, tau_u};
        rows.push_back({kind, complexity(q), fronthaul(kind.processing, L, N_a, K, tau_p, tau_u)});
    }
    return rows;
}

} // namespace cfmimo
