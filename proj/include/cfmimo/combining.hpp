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

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace cfmimo
{

enum class Scheme
{
    mr,
    zf,
    rzf,
    mmse
};

enum class Processing
{
    centralized,
    local
};

struct CombinerKind
{
    Scheme scheme = Scheme::mr;
    Processing processing = Processing::centralized;

    bool centralized() const { return processing == Processing::centralized; }

    std::string name() const
    {
        static constexpr std::array<std::string_view, 4> base{"mr", "zf", "rzf", "mmse"};
        std::string s(base[static_cast<std::size_t>(scheme)]);
        return centralized() ? s : "local-" + s;
    }

    friend bool operator==(const CombinerKind &, const CombinerKind &) = default;
    friend auto operator<=>(const CombinerKind &, const CombinerKind &) = default;
};

inline std::optional<CombinerKind> parse_combiner(std::string_view name)
{
    Processing proc = Processing::centralized;
    if (name.starts_with("local-"))
    {
        proc = Processing::local;
        name.remove_prefix(6);
    }
    if (name == "mr")
        return CombinerKind{Scheme::mr, proc};
    if (name == "zf")
        return CombinerKind{Scheme::zf, proc};
    if (name == "rzf")
        return CombinerKind{Scheme::rzf, proc};
    if (name == "mmse")
        return CombinerKind{Scheme::mmse, proc};
    return std::nullopt;
}

inline std::array<CombinerKind, 8> all_combiners()
{
    return {CombinerKind{Scheme::mr, Processing::centralized}, CombinerKind{Scheme::zf, Processing::centralized},
            CombinerKind{Scheme::rzf, Processing::centralized}, CombinerKind{Scheme::mmse, Processing::centralized},
            CombinerKind{Scheme::mr, Processing::local},        CombinerKind{Scheme::zf, Processing::local},
            CombinerKind{Scheme::rzf, Processing::local},       CombinerKind{Scheme::mmse, Processing::local}};
}

// Above this 2-norm condition number of the estimate matrix, ZF refuses to invert.
inline constexpr double zf_condition_limit = 1e10;

/// Combining vectors for all users, stored M x K.
/// Centralized: column k is d_k. Local: rows of AP l in column k hold v_kl.
struct CombinerSet
{
    CombinerKind kind;
    CMatrix vectors;
    double alpha = 0.0; // centralized RZF only
    int L = 0;
    int N_a = 0;

    auto d(int k) const { return vectors.col(k); }
    auto v(int k, int l) const { return vectors.block(l * N_a, k, N_a, 1); }
};

namespace detail
{

inline CombinerSet make_set(CombinerKind kind, const ChannelState &s)
{
    CombinerSet c;
    c.kind = kind;
    c.L = s.L();
    c.N_a = s.N_a();
    return c;
}

// H (H^H H)^-1 via thin SVD: U S^-1 V^H. Rejects rank-deficient or ill-conditioned H.
inline CMatrix left_pseudo_inverse_adjoint(const CMatrix &H, const char *who)
{
    if (H.rows() < H.cols())
    {
        std::ostringstream os;
        os << who << ": " << H.rows() << " x " << H.cols() << " estimate matrix has fewer rows than users";
        throw DegenerateCombinerError(os.str(), std::numeric_limits<double>::infinity());
    }
    Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector &s = svd.singularValues();
    const double lo = s(s.size() - 1);
    const double cond = lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
    if (!(cond <= zf_condition_limit))
    {
        std::ostringstream os;
        os << who << ": estimate matrix is rank-deficient (condition number " << cond << ")";
        throw DegenerateCombinerError(os.str(), cond);
    }
    return svd.matrixU() * s.cwiseInverse().asDiagonal() * svd.matrixV().adjoint();
}

// H (H^H H + alpha I)^-1.
inline CMatrix regularized_inverse_adjoint(const CMatrix &H, double alpha)
{
    const Eigen::Index K = H.cols();
    const CMatrix G = H.adjoint() * H + alpha * CMatrix::Identity(K, K);
    return hpd_solve(G, H.adjoint()).adjoint();
}

// p_u sum_k eta_k (h_hat_kl h_hat_kl^H + Theta_kl) + sigma^2 I at one AP.
inline CMatrix local_received_covariance(const ChannelState &s, int l, const RVector &eta, double p_u, double sigma_z2)
{
    const int N = s.N_a();
    CMatrix C = sigma_z2 * CMatrix::Identity(N, N);
    for (int k = 0; k < s.K(); ++k)
    {
        if (eta(k) == 0.0)
            continue;
        const CVector h = s.h_hat_kl(k, l);
        C += p_u * eta(k) * (h * h.adjoint() + s.Theta(k, l));
    }
    return C;
}

inline void check_eta(const RVector &eta, int K)
{
    if (eta.size() != K)
        throw ParameterError("power vector length does not match the number of users");
    if ((eta.array() < 0.0).any() || (eta.array() > 1.0).any())
        throw ParameterError("power coefficients must lie in [0, 1]");
}

} // namespace detail

inline CombinerSet mr_centralized(const ChannelState &s)
{
    auto c = detail::make_set({Scheme::mr, Processing::centralized}, s);
    c.vectors = s.h_hat;
    return c;
}

inline CombinerSet zf_centralized(const ChannelState &s)
{
    auto c = detail::make_set({Scheme::zf, Processing::centralized}, s);
    c.vectors = detail::left_pseudo_inverse_adjoint(s.h_hat, "zf_centralized");
    return c;
}

inline CombinerSet rzf_centralized(const ChannelState &s, double alpha)
{
    if (!(alpha > 0.0))
        throw ParameterError("rzf_centralized: alpha must be positive");
    auto c = detail::make_set({Scheme::rzf, Processing::centralized}, s);
    c.vectors = detail::regularized_inverse_adjoint(s.h_hat, alpha);
    c.alpha = alpha;
    return c;
}

/// d_k = (p_u sum_k' eta_k' (h_hat_k' h_hat_k'^H + Theta_k') + sigma^2 I_M)^-1 h_hat_k.
/// Theta_k is block diagonal over APs.
inline CombinerSet mmse_centralized(const ChannelState &s, const RVector &eta, double p_u, double sigma_z2)
{
    detail::check_eta(eta, s.K());
    const int N = s.N_a();
    CMatrix C = p_u * s.h_hat * eta.cast<cplx>().asDiagonal() * s.h_hat.adjoint();
    C.diagonal().array() += sigma_z2;
    for (int l = 0; l < s.L(); ++l)
        for (int k = 0; k < s.K(); ++k)
            if (eta(k) != 0.0)
                C.block(l * N, l * N, N, N) += p_u * eta(k) * s.Theta(k, l);
    auto c = detail::make_set({Scheme::mmse, Processing::centralized}, s);
    c.vectors = hpd_solve(C, s.h_hat);
    return c;
}

inline CombinerSet local_mr(const ChannelState &s)
{
    auto c = detail::make_set({Scheme::mr, Processing::local}, s);
    c.vectors = s.h_hat;
    return c;
}

// Needs N_a >= K at every AP.
inline CombinerSet local_zf(const ChannelState &s)
{
    auto c = detail::make_set({Scheme::zf, Processing::local}, s);
    c.vectors.resize(s.M(), s.K());
    for (int l = 0; l < s.L(); ++l)
        c.vectors.middleRows(l * s.N_a(), s.N_a()) = detail::left_pseudo_inverse_adjoint(s.h_hat_l(l), "local_zf");
    return c;
}

// Regularized with sigma^2 I_K at every AP.
inline CombinerSet local_rzf(const ChannelState &s, double sigma_z2)
{
    auto c = detail::make_set({Scheme::rzf, Processing::local}, s);
    c.vectors.resize(s.M(), s.K());
    for (int l = 0; l < s.L(); ++l)
        c.vectors.middleRows(l * s.N_a(), s.N_a()) = detail::regularized_inverse_adjoint(s.h_hat_l(l), sigma_z2);
    c.alpha = sigma_z2;
    return c;
}

inline CombinerSet local_rzf(const ChannelState &s) { return local_rzf(s, s.stats->sigma_z2); }

inline CombinerSet local_mmse(const ChannelState &s, const RVector &eta, double p_u, double sigma_z2)
{
    detail::check_eta(eta, s.K());
    auto c = detail::make_set({Scheme::mmse, Processing::local}, s);
    c.vectors.resize(s.M(), s.K());
    for (int l = 0; l < s.L(); ++l)
    {
        const CMatrix C = detail::local_received_covariance(s, l, eta, p_u, sigma_z2);
        c.vectors.middleRows(l * s.N_a(), s.N_a()) = hpd_solve(C, s.h_hat_l(l));
    }
    return c;
}

struct CombinerOptions
{
    std::optional<double> rzf_alpha; // defaults to sigma_z^2
};

// Dispatch by kind. eta only matters for the MMSE variants.
inline CombinerSet build_combiners(CombinerKind kind, const ChannelState &s, const RVector &eta, const CombinerOptions &opt = {})
{
    const double p_u = s.stats->p_u;
    const double s2 = s.stats->sigma_z2;
    if (kind.centralized())
    {
        switch (kind.scheme)
        {
        case Scheme::mr: return mr_centralized(s);
        case Scheme::zf: return zf_centralized(s);
        case Scheme::rzf: return rzf_centralized(s, opt.rzf_alpha.value_or(s2));
        case Scheme::mmse: return mmse_centralized(s, eta, p_u, s2);
        }
    }
    switch (kind.scheme)
    {
    case Scheme::mr: return local_mr(s);
    case Scheme::zf: return local_zf(s);
    case Scheme::rzf: return local_rzf(s, s2);
    case Scheme::mmse: return local_mmse(s, eta, p_u, s2);
    }
    throw ParameterError("build_combiners: unknown combiner kind");
}

} // namespace cfmimo
