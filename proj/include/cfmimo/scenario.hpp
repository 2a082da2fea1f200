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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace cfmimo
{

// Three-slope COST-Hata model. Distances in meters, heights in meters, carrier in MHz.
struct PathLossParams
{
    double carrier_mhz = 1900.0;
    double ap_height_m = 15.0;
    double ue_height_m = 1.65;
    double d0_m = 10.0;             // first breakpoint (flat below)
    double d1_m = 50.0;             // second breakpoint (35 dB/decade above)
    double min_distance_m = 10.0;   // distance floor
    bool shadowing = false;
    double shadow_std_db = 8.0;
};

enum class ApLayout
{
    uniform, // uniform random in the disk
    grid     // deterministic square grid inscribed in the disk
};

struct NetworkConfig
{
    int L = 64;                 // APs
    int N_a = 4;                // antennas per AP
    int K = 10;                 // users
    double radius_m = 1000.0;
    double p_u = 0.2;           // UE transmit power [W]
    double bandwidth_hz = 5e6;
    double noise_figure_db = 9.0;
    int tau_c = 200;
    int tau_p = 5;
    int tau_u = 195;
    double asd_deg = 10.0;
    std::uint64_t seed = 0;
    PathLossParams pathloss{};
    ApLayout ap_layout = ApLayout::uniform;

    int M() const { return L * N_a; }

    // Throws ConfigError naming the first violated field.
    void validate() const
    {
        if (L <= 0)
            throw ConfigError("L", "must be positive");
        if (N_a <= 0)
            throw ConfigError("N_a", "must be positive");
        if (K <= 0)
            throw ConfigError("K", "must be positive");
        if (!(radius_m > 0.0))
            throw ConfigError("radius_m", "must be positive");
        if (!(p_u > 0.0))
            throw ConfigError("p_u", "must be positive");
        if (!(bandwidth_hz > 0.0))
            throw ConfigError("bandwidth_hz", "must be positive");
        if (!std::isfinite(noise_figure_db))
            throw ConfigError("noise_figure_db", "must be finite");
        if (tau_c <= 0)
            throw ConfigError("tau_c", "must be positive");
        if (tau_p < 1 || tau_p > tau_c)
            throw ConfigError("tau_p", "must satisfy 1 <= tau_p <= tau_c");
        if (tau_u <= 0)
            throw ConfigError("tau_u", "must be positive");
        if (tau_c != tau_p + tau_u)
            throw ConfigError("tau_c", "must equal tau_p + tau_u");
        if (!(asd_deg > 0.0))
            throw ConfigError("asd_deg", "must be positive");
        const auto &pl = pathloss;
        if (!(pl.carrier_mhz > 0.0))
            throw ConfigError("pathloss.carrier_mhz", "must be positive");
        if (!(pl.ap_height_m > 0.0) || !(pl.ue_height_m > 0.0))
            throw ConfigError("pathloss.ap_height_m", "antenna heights must be positive");
        if (!(pl.d0_m > 0.0) || !(pl.d1_m > pl.d0_m))
            throw ConfigError("pathloss.d1_m", "breakpoints must satisfy 0 < d0 < d1");
        if (!(pl.min_distance_m > 0.0))
            throw ConfigError("pathloss.min_distance_m", "must be positive");
        if (pl.shadowing && !(pl.shadow_std_db >= 0.0))
            throw ConfigError("pathloss.shadow_std_db", "must be non-negative");
    }

    // Advisory checks that do not block construction.
    std::vector<std::string> warnings() const
    {
        std::vector<std::string> w;
        if (M() < 2 * K)
            w.push_back("total antenna count M = " + std::to_string(M()) + " is not much larger than K = " + std::to_string(K));
        if (N_a < K)
            w.push_back("N_a < K: local ZF has no left inverse and will be skipped");
        return w;
    }
};

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

/// Immutable network snapshot.
///
/// R and beta are indexed by (user k, AP l). R(k, l) is N_a x N_a with
/// diagonal beta(k, l). copilot_sets[k] lists every user sharing k's pilot,
/// including k itself.
struct Scenario
{
    NetworkConfig config;
    std::vector<Point2> ap_positions;
    std::vector<Point2> ue_positions;
    RMatrix beta;                     // K x L, linear
    std::vector<CMatrix> correlation; // K * L, row-major in k
    std::vector<int> pilot_of;
    std::vector<std::vector<int>> copilot_sets;
    double sigma_z2 = 0.0;

    int K() const { return config.K; }
    int L() const { return config.L; }
    int N_a() const { return config.N_a; }
    int M() const { return config.M(); }

    const CMatrix &R(int k, int l) const { return correlation[static_cast<std::size_t>(k * config.L + l)]; }
    CMatrix &R(int k, int l) { return correlation[static_cast<std::size_t>(k * config.L + l)]; }
};

// Fixed term of the COST-Hata model [dB].
inline double cost_hata_constant_db(const PathLossParams &p)
{
    const double lf = std::log10(p.carrier_mhz);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(p.ap_height_m) - (1.1 * lf - 0.7) * p.ue_height_m + (1.56 * lf - 0.8);
}

/// Large-scale gain in dB (negative) at 2-D distance d_m.
///
///   d > d1       : -Lc - 35 log10(d)
///   d0 < d <= d1 : -Lc - 15 log10(d1) - 20 log10(d)
///   d <= d0      : -Lc - 15 log10(d1) - 20 log10(d0)
///
/// with distances in km inside the logarithms. Distances below the floor are clamped.
inline double pathloss_db(double d_m, const PathLossParams &p = {})
{
    const double d = std::max(d_m, p.min_distance_m) / 1000.0;
    const double d0 = p.d0_m / 1000.0;
    const double d1 = p.d1_m / 1000.0;
    const double lc = cost_hata_constant_db(p);
    if (d > d1)
        return -lc - 35.0 * std::log10(d);
    if (d > d0)
        return -lc - 15.0 * std::log10(d1) - 20.0 * std::log10(d);
    return -lc - 15.0 * std::log10(d1) - 20.0 * std::log10(d0);
}

/// Gaussian local scattering model for a half-wavelength ULA.
/// Entry (m, n) = beta * exp(j pi (m-n) sin phi) * exp(-(asd^2 / 2) (pi (m-n) cos phi)^2).
inline CMatrix local_scattering_R(int N_a, double phi, double asd, double beta)
{
    constexpr double pi = std::numbers::pi;
    CMatrix R(N_a, N_a);
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    for (int m = 0; m < N_a; ++m)
    {
        for (int n = 0; n < N_a; ++n)
        {
            const double dist = static_cast<double>(m - n);
            const double spread = pi * dist * c;
            R(m, n) = beta * std::polar(1.0, pi * dist * s) * std::exp(-0.5 * asd * asd * spread * spread);
        }
    }
    return R;
}

// Thermal noise power [W] for -174 dBm/Hz density.
inline double noise_power(double bandwidth_hz, double noise_figure_db)
{
    const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

// Round-robin pilot reuse: user k gets pilot k mod tau_p.
inline std::vector<int> assign_pilots(int K, int tau_p)
{
    if (tau_p < 1)
        throw ParameterError("assign_pilots: tau_p must be >= 1");
    std::vector<int> pilot(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        pilot[static_cast<std::size_t>(k)] = k % tau_p;
    return pilot;
}

inline std::vector<std::vector<int>> copilot_sets(const std::vector<int> &pilot_of)
{
    const int K = static_cast<int>(pilot_of.size());
    std::vector<std::vector<int>> sets(pilot_of.size());
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j)
            if (pilot_of[static_cast<std::size_t>(j)] == pilot_of[static_cast<std::size_t>(k)])
                sets[static_cast<std::size_t>(k)].push_back(j);
    return sets;
}

inline Point2 uniform_in_disk(double radius, Rng &rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    const double theta = 2.0 * std::numbers::pi * u(rng);
    return {r * std::cos(theta), r * std::sin(theta)};
}

// Square grid inscribed in the disk, filled row by row; cells beyond L unused.
inline std::vector<Point2> grid_in_disk(int L, double radius)
{
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(L))));
    const double half = radius / std::numbers::sqrt2;
    const double step = 2.0 * half / side;
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(L));
    for (int i = 0; i < side && static_cast<int>(pts.size()) < L; ++i)
        for (int j = 0; j < side && static_cast<int>(pts.size()) < L; ++j)
            pts.push_back({-half + (j + 0.5) * step, -half + (i + 0.5) * step});
    return pts;
}

// Builds a scenario around given AP and UE positions. rng only feeds shadow fading.
inline Scenario scenario_from_positions(const NetworkConfig &config, std::vector<Point2> aps, std::vector<Point2> ues, Rng &rng)
{
    config.validate();
    if (static_cast<int>(aps.size()) != config.L)
        throw ConfigError("L", "number of AP positions does not match L");
    if (static_cast<int>(ues.size()) != config.K)
        throw ConfigError("K", "number of UE positions does not match K");

    Scenario s;
    s.config = config;
    s.ap_positions = std::move(aps);
    s.ue_positions = std::move(ues);
    s.beta.resize(config.K, config.L);
    s.correlation.resize(static_cast<std::size_t>(config.K * config.L));

    const double asd = config.asd_deg * std::numbers::pi / 180.0;
    std::normal_distribution<double> shadow(0.0, config.pathloss.shadow_std_db);
    for (int k = 0; k < config.K; ++k)
    {
        for (int l = 0; l < config.L; ++l)
        {
            const auto &ap = s.ap_positions[static_cast<std::size_t>(l)];
            const auto &ue = s.ue_positions[static_cast<std::size_t>(k)];
            const double dx = ue.x - ap.x;
            const double dy = ue.y - ap.y;
            double gain_db = pathloss_db(std::hypot(dx, dy), config.pathloss);
            if (config.pathloss.shadowing)
                gain_db += shadow(rng);
            const double beta = std::pow(10.0, gain_db / 10.0);
            s.beta(k, l) = beta;
            s.R(k, l) = local_scattering_R(config.N_a, std::atan2(dy, dx), asd, beta);
        }
    }
    s.pilot_of = assign_pilots(config.K, config.tau_p);
    s.copilot_sets = copilot_sets(s.pilot_of);
    s.sigma_z2 = noise_power(config.bandwidth_hz, config.noise_figure_db);
    return s;
}

// Pure function of config (including config.seed).
inline Scenario build_scenario(const NetworkConfig &config)
{
    config.validate();
    Rng rng = make_stream(config.seed, {0x5ce0a710ULL});
    std::vector<Point2> aps;
    if (config.ap_layout == ApLayout::grid)
    {
        aps = grid_in_disk(config.L, config.radius_m);
    }
    else
    {
        aps.reserve(static_cast<std::size_t>(config.L));
        for (int l = 0; l < config.L; ++l)
            aps.push_back(uniform_in_disk(config.radius_m, rng));
    }
    std::vector<Point2> ues;
    ues.reserve(static_cast<std::size_t>(config.K));
    for (int k = 0; k < config.K; ++k)
        ues.push_back(uniform_in_disk(config.radius_m, rng));
    return scenario_from_positions(config, std::move(aps), std::move(ues), rng);
}

} // namespace cfmimo
