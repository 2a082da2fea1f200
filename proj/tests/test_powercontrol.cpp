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

#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace cfmimo;
using namespace cfmimo::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

SinrLinearization scalar_lin(double a, double c, double n)
{
    SinrLinearization lin;
    lin.a = RVector::Constant(1, a);
    lin.B = RMatrix::Zero(1, 1);
    lin.C = RMatrix::Constant(1, 1, c);
    lin.n = RVector::Constant(1, n);
    lin.q = RVector::Zero(1);
    return lin;
}

// a, B_12 = B_21 = b, C_kk = c, C_12 = C_21 = cx, n
SinrLinearization symmetric_lin(double a, double b, double c, double cx, double n)
{
    SinrLinearization lin;
    lin.a = RVector::Constant(2, a);
    lin.B = (RMatrix(2, 2) << 0.0, b, b, 0.0).finished();
    lin.C = (RMatrix(2, 2) << c, cx, cx, c).finished();
    lin.n = RVector::Constant(2, n);
    lin.q = RVector::Zero(2);
    return lin;
}

double min_sinr(const SinrLinearization &lin, const RVector &eta) { return centralized_sinr(lin, eta).minCoeff(); }

} // namespace

TEST_CASE("feasibility check, single user", "[powercontrol]")
{
    const double a = 2.0, c = 0.1, n = 0.5;
    const SinrLinearization lin = scalar_lin(a, c, n);
    const double cap = a / (c + n);
    for (double g : {0.1, 1.0, 3.0, cap * 0.999})
    {
        const auto eta = feasibility_check(lin, g);
        REQUIRE(eta);
        CHECK_THAT((*eta)(0), WithinRel(g * n / (a - g * c), 1e-9));
    }
    CHECK_FALSE(feasibility_check(lin, cap * 1.001));
    CHECK_FALSE(feasibility_check(lin, a / c + 1.0));
}

TEST_CASE("feasibility check basics", "[powercontrol]")
{
    Rng rng(41);
    const SinrLinearization lin = random_linearization(4, rng);
    const auto zero = feasibility_check(lin, 0.0);
    REQUIRE(zero);
    CHECK(zero->isZero());
    CHECK_THROWS_AS(feasibility_check(lin, -1.0), ParameterError);

    const auto sym = feasibility_check(symmetric_lin(3.0, 0.2, 0.05, 0.02, 0.3), 2.0);
    REQUIRE(sym);
    CHECK_THAT((*sym)(0), WithinRel((*sym)(1), 1e-12));
}

TEST_CASE("interference iterates are non-decreasing from zero", "[powercontrol]")
{
    Rng rng(42);
    for (int t = 0; t < 20; ++t)
    {
        const SinrLinearization lin = random_linearization(6, rng);
        const double target = 0.5 * min_sinr(lin, full_power(6));
        PowerVector eta = PowerVector::Zero(6);
        for (int it = 0; it < 200; ++it)
        {
            const PowerVector next = interference_step(lin, target, eta);
            CHECK((next.array() >= eta.array() - 1e-15).all());
            eta = next;
        }
        CHECK((centralized_sinr(lin, eta).array() >= target * (1.0 - 1e-9)).all());
    }
}

TEST_CASE("max-min bisection, single user", "[powercontrol]")
{
    const double a = 2.0, c = 0.1, n = 0.5, eps = 1e-4;
    const MaxMinResult r = maxmin_bisection(scalar_lin(a, c, n), eps);
    CHECK_THAT(r.trace.gamma, WithinAbs(a / (c + n), eps));
    CHECK_THAT(r.eta(0), WithinAbs(1.0, 1e-3));
}

TEST_CASE("max-min bisection, symmetric pair", "[powercontrol]")
{
    const double a = 3.0, b = 0.2, c = 0.05, cx = 0.02, n = 0.3, eps = 1e-6;
    const MaxMinResult r = maxmin_bisection(symmetric_lin(a, b, c, cx, n), eps);
    // both users at full power: a / (b + c + cx + n)
    const double closed = a / (b + c + cx + n);
    CHECK_THAT(r.trace.gamma, WithinAbs(closed, eps));
    CHECK_THAT(r.eta(0), WithinRel(r.eta(1), 1e-9));
}

TEST_CASE("bisection trace arithmetic", "[powercontrol]")
{
    Rng rng(43);
    const SinrLinearization lin = random_linearization(5, rng);
    const double eps = 1e-3;
    const double gmax = sinr_upper_bound(lin);
    const MaxMinResult r = maxmin_bisection(lin, eps);
    const auto &it = r.trace.iterations;
    CHECK(it.size() == static_cast<std::size_t>(std::ceil(std::log2(gmax / eps))));
    for (std::size_t i = 0; i < it.size(); ++i)
    {
        CHECK(it[i].gamma_t == 0.5 * (it[i].gamma_min + it[i].gamma_max));
        if (i > 0)
        {
            CHECK(it[i].gamma_min >= it[i - 1].gamma_min);
            CHECK(it[i].gamma_max <= it[i - 1].gamma_max);
            CHECK_THAT(it[i].gamma_max - it[i].gamma_min, WithinRel(0.5 * (it[i - 1].gamma_max - it[i - 1].gamma_min), 1e-12));
        }
    }
    CHECK(r.trace.eta == r.eta);
    CHECK_THROWS_AS(maxmin_bisection(lin, 0.0), ParameterError);
    CHECK_THROWS_AS(maxmin_bisection(lin, -1e-3), ParameterError);
}

TEST_CASE("max-min never loses to full power", "[powercontrol]")
{
    Rng rng(44);
    const double eps = 1e-3;
    for (int t = 0; t < 100; ++t)
    {
        const int K = 2 + t % 7;
        const SinrLinearization lin = random_linearization(K, rng);
        const MaxMinResult r = maxmin_bisection(lin, eps);
        CHECK((r.eta.array() >= 0.0).all());
        CHECK((r.eta.array() <= 1.0).all());
        CHECK(r.trace.gamma >= min_sinr(lin, full_power(K)) - eps);
    }
}

TEST_CASE("grid search does not beat bisection, K = 3", "[powercontrol]")
{
    Rng rng(45);
    const double eps = 1e-3;
    for (int t = 0; t < 10; ++t)
    {
        const SinrLinearization lin = random_linearization(3, rng);
        const MaxMinResult r = maxmin_bisection(lin, eps);
        double best = 0.0;
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j)
                for (int k = 0; k <= 20; ++k)
                    best = std::max(best, min_sinr(lin, (RVector(3) << 0.05 * i, 0.05 * j, 0.05 * k).finished()));
        CHECK(best <= r.trace.gamma + eps);
    }
}

TEST_CASE("centralized bound on an actual channel", "[powercontrol]")
{
    Rng rng(46);
    const double p = 0.2, s2 = 0.05;
    const ChannelState s = random_state(4, 2, 4, rng, 0.05, p, s2);
    const SinrLinearization lin = linearize_sinr(mmse_centralized(s, full_power(4), p, s2), s, p, s2);
    const double gmax = centralized_gamma_max(s, p, s2);
    CHECK(gmax >= centralized_sinr(lin, full_power(4)).maxCoeff());
    const MaxMinResult r = maxmin_bisection(lin, 1e-3, p, s2, s);
    CHECK(r.trace.iterations.front().gamma_max == gmax);
    CHECK(r.trace.gamma >= min_sinr(lin, full_power(4)) - 1e-3);
}

TEST_CASE("quadratic self term from the distributed form", "[powercontrol]")
{
    std::vector<CMatrix> R;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 2; ++l)
            R.push_back(local_scattering_R(2, 0.5 * k - 0.4 * l, 0.2, 1.0 / (1 + k + 2 * l)));
    const Scenario scn = manual_scenario(2, 2, 3, 2, 1.0, 0.2, R);
    const DistributedMoments mom = estimate_distributed_moments(estimation_statistics(scn), *parse_combiner("local-mr"),
                                                                full_power(3), 400, 8);
    const SinrLinearization lin = linearize_distributed(mom, 1.0, 0.2, Eq12Form::as_printed);
    REQUIRE_FALSE(lin.linear());
    const double eps = 1e-4;
    const MaxMinResult r = maxmin_bisection(lin, eps);
    const RVector g = distributed_sinr(mom, r.eta, 1.0, 0.2);
    CHECK(g.minCoeff() >= distributed_sinr(mom, full_power(3), 1.0, 0.2).minCoeff() - eps);
    // last feasible target is met by the returned powers
    double last = 0.0;
    for (const auto &st : r.trace.iterations)
        if (st.feasible)
            last = st.gamma_t;
    CHECK(g.minCoeff() >= last * (1.0 - 1e-9));
}
