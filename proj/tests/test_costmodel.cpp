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

using namespace cfmimo;
using namespace cfmimo::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

CombinerKind kind(const char *name) { return *parse_combiner(name); }

Rational cost(const char *name, std::int64_t L, std::int64_t N_a, std::int64_t K, std::int64_t tau_u, std::int64_t tau_p = 5)
{
    return complexity({kind(name), L * N_a, K, L, N_a, tau_p, tau_u});
}

// Naive complex arithmetic that tallies every complex multiplication.
struct Counter
{
    std::int64_t mults = 0;

    cplx mul(cplx a, cplx b)
    {
        ++mults;
        return a * b;
    }

    // A^H B
    CMatrix gram(const CMatrix &A, const CMatrix &B)
    {
        CMatrix G = CMatrix::Zero(A.cols(), B.cols());
        for (Eigen::Index i = 0; i < A.cols(); ++i)
            for (Eigen::Index j = 0; j < B.cols(); ++j)
                for (Eigen::Index m = 0; m < A.rows(); ++m)
                    G(i, j) += mul(std::conj(A(m, i)), B(m, j));
        return G;
    }

    CMatrix product(const CMatrix &A, const CMatrix &B)
    {
        CMatrix P = CMatrix::Zero(A.rows(), B.cols());
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < B.cols(); ++j)
                for (Eigen::Index m = 0; m < A.cols(); ++m)
                    P(i, j) += mul(A(i, m), B(m, j));
        return P;
    }

    // sum_k h_k h_k^H
    CMatrix outer_sum(const CMatrix &H)
    {
        CMatrix S = CMatrix::Zero(H.rows(), H.rows());
        for (Eigen::Index k = 0; k < H.cols(); ++k)
            for (Eigen::Index i = 0; i < H.rows(); ++i)
                for (Eigen::Index j = 0; j < H.rows(); ++j)
                    S(i, j) += mul(H(i, k), std::conj(H(j, k)));
        return S;
    }

    // In-place Gauss-Jordan inversion without pivoting: n^3 - n multiplications.
    CMatrix inverse(CMatrix A)
    {
        const Eigen::Index n = A.rows();
        for (Eigen::Index k = 0; k < n; ++k)
        {
            const cplx p = 1.0 / A(k, k);
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != k)
                    A(k, j) = mul(A(k, j), p);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                if (i == k)
                    continue;
                const cplx f = A(i, k);
                for (Eigen::Index j = 0; j < n; ++j)
                    if (j != k)
                        A(i, j) -= mul(f, A(k, j));
                A(i, k) = -mul(f, p);
            }
            A(k, k) = p;
        }
        return A;
    }
};

} // namespace

TEST_CASE("complexity at the reference operating point", "[costmodel]")
{
    // M = 256, K = 10, L = 64, tau_u = 195
    CHECK(cost("mr", 64, 4, 10, 195) == Rational(2560));
    CHECK(cost("local-mr", 64, 4, 10, 195) == Rational(2560));

    const Rational zf = cost("zf", 64, 4, 10, 195);
    CHECK(zf == Rational(2 * 100 * 256 + 1000, 195) + 2560);
    CHECK_THAT(to_double(zf), WithinAbs(2827.6923076923, 1e-9));
    CHECK_THAT(to_double(zf / cost("mr", 64, 4, 10, 195)), WithinAbs(1.1046, 5e-5));

    const Rational lzf = cost("local-zf", 64, 4, 10, 195);
    CHECK_THAT(to_double(lzf), WithinAbs(3150.7692307692, 1e-9));
    CHECK(lzf > zf);

    CHECK_THAT(to_double(cost("mmse", 64, 4, 10, 195)), WithinAbs(95318.646153846, 1e-6));
    CHECK(cost("rzf", 64, 4, 10, 195) == zf);
    CHECK(cost("local-rzf", 64, 4, 10, 195) == lzf);
    CHECK(cost("local-mmse", 64, 4, 10, 195) == Rational(256 * 16 + 2 * 10 * 256 * 4, 195) + 2560);
}

TEST_CASE("cost table ordering", "[costmodel]")
{
    const auto rows = cost_table(64, 4, 10, 5, 195);
    REQUIRE(rows.size() == 8);
    const auto mmse = std::find_if(rows.begin(), rows.end(), [](const CostRecord &r) { return r.method == kind("mmse"); });
    for (const auto &r : rows)
    {
        if (r.method != mmse->method)
            CHECK(r.complexity < mmse->complexity);
        CHECK(r.fronthaul == (r.method.centralized() ? 51200 : 124800));
    }
}

TEST_CASE("complexity invariants over a parameter grid", "[costmodel]")
{
    for (std::int64_t K : {1, 2, 5, 10, 40})
        for (std::int64_t L : {1, 2, 16, 64})
            for (std::int64_t N : {1, 2, 4, 8})
                for (std::int64_t tau_u : {1, 10, 195, 1000})
                {
                    CHECK(cost("zf", L, N, K, tau_u) == cost("rzf", L, N, K, tau_u));
                    CHECK(cost("local-zf", L, N, K, tau_u) >= cost("zf", L, N, K, tau_u));
                    CHECK(cost("local-rzf", L, N, K, tau_u) == cost("local-zf", L, N, K, tau_u));
                    if (L > 1)
                        CHECK(cost("local-zf", L, N, K, tau_u) > cost("zf", L, N, K, tau_u));
                }
}

TEST_CASE("query validation", "[costmodel]")
{
    CHECK_THROWS_AS(complexity({kind("mr"), 10, 2, 2, 4, 1, 10}), ParameterError);
    CHECK_THROWS_AS(complexity({kind("mr"), 8, 2, 2, 4, 1, 0}), ParameterError);
    CHECK_THROWS_AS(complexity({kind("mr"), 8, 0, 2, 4, 1, 10}), ParameterError);
    CHECK_THROWS_AS(fronthaul(Processing::local, 0, 4, 10, 5, 195), ParameterError);
}

TEST_CASE("fronthaul", "[costmodel]")
{
    CHECK(fronthaul(Processing::centralized, 64, 4, 10, 5, 195) == 51200);
    CHECK(fronthaul(Processing::local, 64, 4, 10, 5, 195) == 124800);
    SECTION("ratio without pilots is K / N_a")
    {
        for (std::int64_t K : {1, 3, 10})
            for (std::int64_t N : {1, 2, 4, 7})
                CHECK(Rational(fronthaul(Processing::local, 16, N, K, 0, 100), fronthaul(Processing::centralized, 16, N, K, 0, 100)) ==
                      Rational(K, N));
    }
    SECTION("distributed exceeds centralized exactly when K > N_a (tau_p + tau_u) / tau_u")
    {
        for (std::int64_t K = 1; K <= 30; ++K)
            for (std::int64_t N : {1, 2, 4})
                for (std::int64_t tp : {0, 1, 5, 20})
                {
                    const std::int64_t tu = 50;
                    const bool more = fronthaul(Processing::local, 8, N, K, tp, tu) > fronthaul(Processing::centralized, 8, N, K, tp, tu);
                    CHECK(more == (Rational(K) > Rational(N * (tp + tu), tu)));
                }
    }
}

TEST_CASE("analytic counts agree with an instrumented implementation", "[costmodel]")
{
    Rng rng(51);
    for (int K : {1, 2, 3})
    {
        for (int L : {1, 2, 4})
        {
            for (int N : {2, 4})
            {
                const int M = L * N;
                if (M > 16 || M < K)
                    continue;
                const CMatrix H = random_cmatrix(M, K, rng);

                // centralized ZF: Gram, inverse, inverse times H^H
                Counter zf;
                const CMatrix A = zf.product(zf.inverse(zf.gram(H, H)), H.adjoint());
                CHECK((A * H - CMatrix::Identity(K, K)).norm() < 1e-8);
                const std::int64_t zf_block = 2LL * K * K * M + K * K * K;
                CHECK(zf.mults == zf_block - K);

                // centralized MMSE: outer products, M x M inverse, inverse times H
                Counter mm;
                CMatrix C = mm.outer_sum(H);
                C.diagonal().array() += 1.0;
                const CMatrix D = mm.product(mm.inverse(C), H);
                CHECK((C * D - H).norm() < 1e-8);
                const std::int64_t mmse_block = std::int64_t(M) * M * M + 2LL * K * M * M;
                CHECK(mm.mults == mmse_block - M);

                // local MMSE: the same per AP with N_a antennas
                Counter lm;
                for (int l = 0; l < L; ++l)
                {
                    const CMatrix Hl = H.middleRows(l * N, N);
                    CMatrix Cl = lm.outer_sum(Hl);
                    Cl.diagonal().array() += 1.0;
                    (void)lm.product(lm.inverse(Cl), Hl);
                }
                const std::int64_t lmmse_block = std::int64_t(M) * N * N + 2LL * K * M * N;
                CHECK(lm.mults == lmmse_block - M);

                // local ZF needs N_a >= K
                if (N >= K)
                {
                    Counter lz;
                    for (int l = 0; l < L; ++l)
                    {
                        const CMatrix Hl = H.middleRows(l * N, N);
                        (void)lz.product(lz.inverse(lz.gram(Hl, Hl)), Hl.adjoint());
                    }
                    CHECK(lz.mults == 2LL * K * K * M + std::int64_t(K) * K * K * L - std::int64_t(K) * L);
                }

                // detection: one inner product of length M per user and channel use
                Counter det;
                const CVector y = complex_gaussian(M, rng);
                (void)det.gram(A.adjoint(), y);
                CHECK(det.mults == std::int64_t(K) * M);

                // the analytic formulas are the counted per-block work spread over tau_u plus detection
                const std::int64_t tau_u = 97;
                CHECK(complexity({kind("zf"), M, K, L, N, 3, tau_u}) == Rational(zf_block, tau_u) + K * M);
                CHECK(complexity({kind("mmse"), M, K, L, N, 3, tau_u}) == Rational(mmse_block, tau_u) + K * M);
                CHECK(complexity({kind("local-mmse"), M, K, L, N, 3, tau_u}) == Rational(lmmse_block, tau_u) + K * M);
            }
        }
    }
}
