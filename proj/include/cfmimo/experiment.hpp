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
#include "costmodel.hpp"
#include "errors.hpp"
#include "performance.hpp"
#include "powercontrol.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace cfmimo
{

enum class PowerPolicy
{
    full,
    maxmin
};

inline std::string policy_name(PowerPolicy p) { return p == PowerPolicy::full ? "full" : "maxmin"; }

inline std::optional<PowerPolicy> parse_policy(std::string_view s)
{
    if (s == "full")
        return PowerPolicy::full;
    if (s == "maxmin")
        return PowerPolicy::maxmin;
    return std::nullopt;
}

inline std::vector<CombinerKind> combiner_list()
{
    const auto all = all_combiners();
    return {all.begin(), all.end()};
}

struct ExperimentConfig
{
    NetworkConfig network{};
    int n_setups = 50;
    int n_blocks = 100;      // coherence blocks per setup, centralized SE average
    int moment_blocks = 500; // realizations per setup for the distributed moments
    std::vector<CombinerKind> combiners = combiner_list();
    std::vector<PowerPolicy> power_policies{PowerPolicy::full, PowerPolicy::maxmin};
    double epsilon = 1e-3;
    Prelog prelog_form = Prelog::as_printed;
    Eq12Form eq12_form = Eq12Form::as_printed;
    std::optional<double> rzf_alpha; // unset: sigma_z^2
    int mmse_power_refresh = 0;      // extra rebuild-and-rebisect rounds for MMSE under max-min
    std::string output_dir = "results";
    std::uint64_t master_seed = 1;
    int workers = 1;

    void validate() const
    {
        network.validate();
        if (n_setups < 1)
            throw ConfigError("n_setups", "must be >= 1");
        if (n_blocks < 1)
            throw ConfigError("n_blocks", "must be >= 1");
        if (moment_blocks < 1)
            throw ConfigError("moment_blocks", "must be >= 1");
        if (combiners.empty())
            throw ConfigError("combiners", "must not be empty");
        if (power_policies.empty())
            throw ConfigError("power_policies", "must not be empty");
        if (!(epsilon > 0.0))
            throw ConfigError("epsilon", "must be positive");
        if (rzf_alpha && !(*rzf_alpha > 0.0))
            throw ConfigError("rzf_alpha", "must be positive");
        if (mmse_power_refresh < 0)
            throw ConfigError("mmse_power_refresh", "must be >= 0");
        if (workers < 0)
            throw ConfigError("workers", "must be >= 0");
        if (prelog_form == Prelog::as_printed && network.tau_p >= network.tau_u)
            throw ConfigError("tau_p", "as-printed prelog needs tau_p < tau_u");
    }
};

// Full-scale evaluation profile: 64 four-antenna APs, 10 users, 5 pilots.
inline ExperimentConfig paper_profile()
{
    ExperimentConfig cfg;
    cfg.n_setups = 100;
    cfg.n_blocks = 100;
    return cfg;
}

// Small profile for CI: 16 two-antenna APs, 6 users, 3 pilots.
inline ExperimentConfig desk_profile()
{
    ExperimentConfig cfg;
    cfg.network.L = 16;
    cfg.network.N_a = 2;
    cfg.network.K = 6;
    cfg.network.tau_p = 3;
    cfg.network.tau_u = 197;
    cfg.network.tau_c = 200;
    cfg.n_setups = 50;
    cfg.n_blocks = 100;
    return cfg;
}

struct ResultRecord
{
    int setup = 0;
    int user = 0;
    CombinerKind combiner;
    PowerPolicy policy = PowerPolicy::full;
    double se = 0.0;   // mean over blocks [bit/channel use]
    double sinr = 0.0; // mean over blocks, linear
    double eta = 1.0;  // mean power coefficient over blocks
};

struct SkipRecord
{
    int setup = 0;
    CombinerKind combiner;
    std::string reason;
};

struct ResultSet
{
    ExperimentConfig config;
    std::vector<ResultRecord> records;
    std::vector<SkipRecord> skipped;
    std::vector<CostRecord> costs;
    std::vector<std::string> warnings;
    std::string trace; // bisection traces, filled when requested
};

namespace detail
{

struct SetupOutcome
{
    std::vector<ResultRecord> records;
    std::vector<SkipRecord> skipped;
    std::string trace;
};

struct Accumulator
{
    RVector se, sinr, eta;
    explicit Accumulator(int K) : se(RVector::Zero(K)), sinr(RVector::Zero(K)), eta(RVector::Zero(K)) {}
};

inline void push_records(SetupOutcome &out, int setup, CombinerKind kind, PowerPolicy policy, const Accumulator &acc,
                         double scale)
{
    for (int k = 0; k < acc.se.size(); ++k)
        out.records.push_back({setup, k, kind, policy, acc.se(k) * scale, acc.sinr(k) * scale, acc.eta(k) * scale});
}

inline MaxMinResult centralized_maxmin(const ExperimentConfig &cfg, CombinerKind kind, const ChannelState &state,
                                       const SinrLinearization &full_lin, SinrLinearization &lin_used)
{
    const double p_u = state.stats->p_u;
    const double s2 = state.stats->sigma_z2;
    lin_used = full_lin;
    MaxMinResult r = maxmin_bisection(lin_used, cfg.epsilon, p_u, s2, state);
    if (kind.scheme == Scheme::mmse)
    {
        for (int i = 0; i < cfg.mmse_power_refresh; ++i)
        {
            const CombinerSet c = mmse_centralized(state, r.eta, p_u, s2);
            lin_used = linearize_sinr(c, state, p_u, s2);
            r = maxmin_bisection(lin_used, cfg.epsilon, p_u, s2, state);
        }
    }
    return r;
}

inline SetupOutcome run_setup(const ExperimentConfig &cfg, int setup, bool want_trace)
{
    SetupOutcome out;
    NetworkConfig net = cfg.network;
    net.seed = make_stream(cfg.master_seed, {static_cast<std::uint64_t>(setup), 0})();
    const Scenario scn = build_scenario(net);
    const StatisticsPtr stats = estimation_statistics(scn);
    const int K = scn.K();
    const double p_u = net.p_u, s2 = scn.sigma_z2;
    const PowerVector ones = full_power(K);
    const bool want_full = std::find(cfg.power_policies.begin(), cfg.power_policies.end(), PowerPolicy::full) != cfg.power_policies.end();
    const bool want_maxmin = std::find(cfg.power_policies.begin(), cfg.power_policies.end(), PowerPolicy::maxmin) != cfg.power_policies.end();
    CombinerOptions copt;
    copt.rzf_alpha = cfg.rzf_alpha;
    std::ostringstream trace;

    auto se_of = [&](double g) { return spectral_efficiency(g, net.tau_p, net.tau_u, cfg.prelog_form); };

    // Centralized: instantaneous SINR averaged over blocks.
    std::vector<CombinerKind> central;
    for (auto c : cfg.combiners)
        if (c.centralized())
            central.push_back(c);
    std::vector<Accumulator> acc_full(central.size(), Accumulator(K)), acc_mm(central.size(), Accumulator(K));
    std::vector<std::string> failed(central.size());
    for (int b = 0; b < cfg.n_blocks && !central.empty(); ++b)
    {
        const std::uint64_t block_seed = make_stream(cfg.master_seed, {static_cast<std::uint64_t>(setup), 1, static_cast<std::uint64_t>(b)})();
        const ChannelState state = realize_block(stats, block_seed);
        for (std::size_t i = 0; i < central.size(); ++i)
        {
            if (!failed[i].empty())
                continue;
            try
            {
                const CombinerSet comb = build_combiners(central[i], state, ones, copt);
                const SinrLinearization lin = linearize_sinr(comb, state, p_u, s2);
                if (want_full)
                {
                    const RVector g = centralized_sinr(lin, ones);
                    for (int k = 0; k < K; ++k)
                    {
                        acc_full[i].se(k) += se_of(g(k));
                        acc_full[i].sinr(k) += g(k);
                        acc_full[i].eta(k) += 1.0;
                    }
                }
                if (want_maxmin)
                {
                    SinrLinearization used;
                    const MaxMinResult r = centralized_maxmin(cfg, central[i], state, lin, used);
                    const RVector g = centralized_sinr(used, r.eta);
                    for (int k = 0; k < K; ++k)
                    {
                        acc_mm[i].se(k) += se_of(g(k));
                        acc_mm[i].sinr(k) += g(k);
                        acc_mm[i].eta(k) += r.eta(k);
                    }
                    if (want_trace && b == 0)
                    {
                        trace << "# setup " << setup << " block 0 combiner " << central[i].name() << '\n';
                        print_trace(trace, r.trace);
                    }
                }
            }
            catch (const DegenerateCombinerError &e)
            {
                failed[i] = std::string("skipped: rank-deficient (") + e.what() + ")";
            }
        }
    }
    for (std::size_t i = 0; i < central.size(); ++i)
    {
        if (!failed[i].empty())
        {
            out.skipped.push_back({setup, central[i], failed[i]});
            continue;
        }
        const double scale = 1.0 / cfg.n_blocks;
        for (auto p : cfg.power_policies)
            push_records(out, setup, central[i], p, p == PowerPolicy::full ? acc_full[i] : acc_mm[i], scale);
    }

    // Distributed: statistical SINR from sample moments. All local kinds share one set of realizations.
    const std::uint64_t moment_seed = make_stream(cfg.master_seed, {static_cast<std::uint64_t>(setup), 2})();
    for (auto kind : cfg.combiners)
    {
        if (kind.centralized())
            continue;
        try
        {
            const DistributedMoments mom = estimate_distributed_moments(stats, kind, ones, cfg.moment_blocks, moment_seed);
            for (auto p : cfg.power_policies)
            {
                Accumulator acc(K);
                PowerVector eta = ones;
                if (p == PowerPolicy::maxmin)
                {
                    const SinrLinearization lin = linearize_distributed(mom, p_u, s2, cfg.eq12_form);
                    const MaxMinResult r = maxmin_bisection(lin, cfg.epsilon);
                    eta = r.eta;
                    if (want_trace)
                    {
                        trace << "# setup " << setup << " combiner " << kind.name() << '\n';
                        print_trace(trace, r.trace);
                    }
                }
                const RVector g = distributed_sinr(mom, eta, p_u, s2, cfg.eq12_form);
                for (int k = 0; k < K; ++k)
                {
                    acc.se(k) = se_of(g(k));
                    acc.sinr(k) = g(k);
                    acc.eta(k) = eta(k);
                }
                push_records(out, setup, kind, p, acc, 1.0);
            }
        }
        catch (const DegenerateCombinerError &e)
        {
            out.skipped.push_back({setup, kind, std::string("skipped: rank-deficient (") + e.what() + ")"});
        }
        catch (const MomentInconsistencyError &e)
        {
            out.skipped.push_back({setup, kind, std::string("skipped: moment-inconsistent (") + e.what() + ")"});
        }
    }
    if (want_trace)
        out.trace = trace.str();
    return out;
}

} // namespace detail

/// Monte-Carlo evaluation over setups and coherence blocks.
///
/// Every setup draws from streams keyed by (master_seed, setup, ...), so the
/// output does not depend on the number of workers. Records are ordered by
/// setup, then by the combiner list, then policy, then user. A combiner that
/// hits a degenerate channel matrix in a setup is reported in `skipped`
/// instead of producing records.
inline ResultSet run_experiment(const ExperimentConfig &cfg, bool with_trace = false)
{
    cfg.validate();
    ResultSet rs;
    rs.config = cfg;
    rs.warnings = cfg.network.warnings();

    std::vector<detail::SetupOutcome> outcomes(static_cast<std::size_t>(cfg.n_setups));
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = std::min(cfg.n_setups, cfg.workers == 0 ? static_cast<int>(hw) : cfg.workers);
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&]
    {
        for (int s = next++; s < cfg.n_setups; s = next++)
        {
            try
            {
                outcomes[static_cast<std::size_t>(s)] = detail::run_setup(cfg, s, with_trace && s == 0);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    if (workers <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (error)
        std::rethrow_exception(error);

    for (auto &o : outcomes)
    {
        rs.records.insert(rs.records.end(), o.records.begin(), o.records.end());
        rs.skipped.insert(rs.skipped.end(), o.skipped.begin(), o.skipped.end());
        rs.trace += o.trace;
    }
    const auto &n = cfg.network;
    for (auto &row : cost_table(n.L, n.N_a, n.K, n.tau_p, n.tau_u))
        if (std::find(cfg.combiners.begin(), cfg.combiners.end(), row.method) != cfg.combiners.end())
            rs.costs.push_back(row);
    return rs;
}

struct CapacityRecord
{
    int setup = 0;
    CombinerKind combiner;
    PowerPolicy policy = PowerPolicy::full;
    double mbps = 0.0;
};

/// Sum throughput bandwidth * sum_k SE_k per (setup, combiner, policy), in Mbit/s.
/// Every group must cover every user that appears anywhere in the records.
inline std::vector<CapacityRecord> sum_capacity(const std::vector<ResultRecord> &records, double bandwidth_hz)
{
    std::set<int> users;
    for (const auto &r : records)
        users.insert(r.user);
    using Key = std::tuple<int, CombinerKind, PowerPolicy>;
    std::map<Key, std::pair<double, std::set<int>>> groups;
    std::vector<Key> order;
    for (const auto &r : records)
    {
        const Key key{r.setup, r.combiner, r.policy};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted)
            order.push_back(key);
        if (!it->second.second.insert(r.user).second)
            throw ConsistencyError("sum_capacity: duplicate record for user " + std::to_string(r.user));
        it->second.first += r.se;
    }
    std::vector<CapacityRecord> out;
    out.reserve(order.size());
    for (const auto &key : order)
    {
        const auto &g = groups.at(key);
        if (g.second.size() != users.size())
            throw ConsistencyError("sum_capacity: setup " + std::to_string(std::get<0>(key)) + " combiner " +
                                   std::get<1>(key).name() + " does not cover all users");
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), bandwidth_hz * g.first / 1e6});
    }
    return out;
}

} // namespace cfmimo
