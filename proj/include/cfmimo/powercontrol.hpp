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
#include "errors.hpp"
#include "linalg.hpp"
#include "performance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

namespace cfmimo
{

// Per-user power coefficients, each in [0, 1].
using PowerVector = RVector;

inline PowerVector full_power(int K) { return PowerVector::Ones(K); }

struct FixedPointOptions
{
    int max_iterations = 500;
    double tolerance = 1e-12; // componentwise absolute change
};

/// Smallest eta_k >= 0 meeting gamma_k >= target with the other users fixed at eta.
/// Returns +inf when no finite power reaches the target.
inline double minimal_own_power(const SinrLinearization &lin, int k, const PowerVector &eta, double target)
{
    if (target == 0.0)
        return 0.0;
    double other = lin.n(k);
    for (int j = 0; j < lin.users(); ++j)
        if (j != k)
            other += eta(j) * (lin.B(k, j) + lin.C(k, j));
    const double slope = lin.a(k) - target * lin.C(k, k);
    const double quad = lin.q.size() != 0 ? target * lin.q(k) : 0.0;
    const double rhs = target * other;
    if (quad <= 0.0)
        return slope > 0.0 ? rhs / slope : std::numeric_limits<double>::infinity();
    // quad eta^2 + slope eta - rhs = 0, positive root.
    const double disc = std::sqrt(slope * slope + 4.0 * quad * rhs);
    return slope > 0.0 ? 2.0 * rhs / (slope + disc) : (disc - slope) / (2.0 * quad);
}

// One application of the interference map eta -> (minimal own power per user).
inline PowerVector interference_step(const SinrLinearization &lin, double target, const PowerVector &eta)
{
    PowerVector next(lin.users());
    for (int k = 0; k < lin.users(); ++k)
        next(k) = minimal_own_power(lin, k, eta, target);
    return next;
}

namespace detail
{

// Direct solve of the linear system at the fixed point (q = 0 only).
inline std::optional<PowerVector> solve_fixed_point_directly(const SinrLinearization &lin, double target)
{
    const int K = lin.users();
    RMatrix A = RMatrix::Zero(K, K);
    RVector rhs(K);
    for (int k = 0; k < K; ++k)
    {
        const double slope = lin.a(k) - target * lin.C(k, k);
        if (!(slope > 0.0))
            return std::nullopt;
        A(k, k) = slope;
        for (int j = 0; j < K; ++j)
            if (j != k)
                A(k, j) = -target * (lin.B(k, j) + lin.C(k, j));
        rhs(k) = target * lin.n(k);
    }
    PowerVector eta = A.partialPivLu().solve(rhs);
    if (!eta.allFinite() || (eta.array() < -1e-12).any() || (eta.array() > 1.0).any())
        return std::nullopt;
    eta = eta.cwiseMax(0.0);
    const RVector g = centralized_sinr(lin, eta);
    if ((g.array() < target * (1.0 - 1e-9)).any())
        return std::nullopt;
    return eta;
}

} // namespace detail

/// Decides whether min_k gamma_k >= target is reachable with 0 <= eta <= 1.
///
/// Iterates the interference map from eta = 0. Iterates are componentwise
/// non-decreasing and converge to the minimal feasible power vector when one
/// exists; any component above 1 means infeasible. If the iteration has not
/// settled after max_iterations, a linear problem is decided by solving the
/// fixed-point equations directly, a quadratic one is declared infeasible.
inline std::optional<PowerVector> feasibility_check(const SinrLinearization &lin, double target, const FixedPointOptions &opt = {})
{
    if (target < 0.0)
        throw ParameterError("feasibility_check: target SINR must be non-negative");
    const int K = lin.users();
    PowerVector eta = PowerVector::Zero(K);
    if (target == 0.0)
        return eta;
    for (int it = 0; it < opt.max_iterations; ++it)
    {
        const PowerVector next = interference_step(lin, target, eta);
        if (!next.allFinite() || (next.array() > 1.0).any())
            return std::nullopt;
        const double change = (next - eta).cwiseAbs().maxCoeff();
        eta = next;
        if (change < opt.tolerance)
            return eta;
    }
    if (lin.linear())
        return detail::solve_fixed_point_directly(lin, target);
    return std::nullopt;
}

struct BisectionStep
{
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    double gamma_t = 0.0;
    bool feasible = false;
};

struct BisectionTrace
{
    std::vector<BisectionStep> iterations;
    PowerVector eta;
    double gamma = 0.0; // min_k gamma_k(eta)
};

struct MaxMinResult
{
    PowerVector eta;
    BisectionTrace trace;
};

inline void print_trace(std::ostream &os, const BisectionTrace &t)
{
    for (std::size_t i = 0; i < t.iterations.size(); ++i)
    {
        const auto &s = t.iterations[i];
        os << "iter " << i << " gamma_min=" << s.gamma_min << " gamma_max=" << s.gamma_max << " gamma_t=" << s.gamma_t
           << (s.feasible ? " feasible" : " infeasible") << '\n';
    }
}

// Upper bound on any user's SINR: gamma_k <= a_k / (C_kk - q_k + n_k) at eta_k = 1, others silent.
inline double sinr_upper_bound(const SinrLinearization &lin)
{
    double best = 0.0;
    for (int k = 0; k < lin.users(); ++k)
    {
        const double q = lin.q.size() != 0 ? lin.q(k) : 0.0;
        best = std::max(best, lin.a(k) / (lin.C(k, k) - q + lin.n(k)));
    }
    return best;
}

/// Bisection on the common SINR target over [0, gamma_max_init].
///
/// Stops once gamma_max - gamma_min <= epsilon and returns the power vector of
/// the last feasible target. The starting point is full power, which is
/// feasible for target 0. The caller must supply an upper bound on the optimum.
inline MaxMinResult maxmin_bisection(const SinrLinearization &lin, double epsilon, double gamma_max_init,
                                     const FixedPointOptions &opt = {})
{
    if (!(epsilon > 0.0))
        throw ParameterError("maxmin_bisection: epsilon must be positive");
    const int K = lin.users();
    MaxMinResult res;
    res.eta = full_power(K);
    double lo = 0.0;
    double hi = gamma_max_init;
    while (hi - lo > epsilon)
    {
        BisectionStep step{lo, hi, 0.5 * (lo + hi), false};
        if (auto eta = feasibility_check(lin, step.gamma_t, opt))
        {
            step.feasible = true;
            res.eta = *eta;
            lo = step.gamma_t;
        }
        else
        {
            hi = step.gamma_t;
        }
        res.trace.iterations.push_back(step);
    }
    res.trace.eta = res.eta;
    res.trace.gamma = centralized_sinr(lin, res.eta).minCoeff();
    return res;
}

// Starts from the generic bound a_k / (C_kk - q_k + n_k); suits distributed linearizations.
inline MaxMinResult maxmin_bisection(const SinrLinearization &lin, double epsilon, const FixedPointOptions &opt = {})
{
    return maxmin_bisection(lin, epsilon, sinr_upper_bound(lin), opt);
}

// gamma_max^(0) = max_k p_u sum_l ||h_hat_kl||^2 / sigma^2.
inline double centralized_gamma_max(const ChannelState &s, double p_u, double sigma_z2)
{
    return p_u * s.h_hat.colwise().squaredNorm().maxCoeff() / sigma_z2;
}

inline MaxMinResult maxmin_bisection(const SinrLinearization &lin, double epsilon, double p_u, double sigma_z2,
                                     const ChannelState &state, const FixedPointOptions &opt = {})
{
    return maxmin_bisection(lin, epsilon, centralized_gamma_max(state, p_u, sigma_z2), opt);
}

} // namespace cfmimo
