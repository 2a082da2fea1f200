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

// Config files (JSON) and result files (CSV + manifest.json).
//
// results.csv     setup,user,combiner,policy,se,sinr
// power.csv       setup,user,combiner,policy,eta
// capacity.csv    setup,combiner,policy,capacity_mbps
// costs.csv       combiner,processing,complexity,complexity_exact,fronthaul
// cdf_se.csv      combiner,policy,value,probability
// cdf_capacity.csv combiner,policy,value,probability
// manifest.json   resolved config, seed, skipped combiners, warnings

#pragma once

#include "experiment.hpp"
#include "stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace cfmimo
{

using json = nlohmann::json;

// Shortest round-trip decimal form, independent of the global locale.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConsistencyError("cannot parse number '" + std::string(s) + "'");
    return v;
}

namespace detail
{

inline void check_keys(const json &j, std::initializer_list<std::string_view> allowed, const std::string &where)
{
    if (!j.is_object())
        throw ConfigError(where.empty() ? "<root>" : where, "expected an object");
    for (const auto &item : j.items())
    {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
}

template <class T>
void read_key(const json &j, const char *key, T &dst, const std::string &where)
{
    if (!j.contains(key))
        return;
    try
    {
        dst = j.at(key).get<T>();
    }
    catch (const json::exception &e)
    {
        throw ConfigError(where.empty() ? key : where + "." + key, e.what());
    }
}

inline std::string prelog_name(Prelog p) { return p == Prelog::as_printed ? "as-printed" : "conventional"; }
inline std::string eq12_name(Eq12Form f) { return f == Eq12Form::as_printed ? "as-printed" : "standard"; }

} // namespace detail

/// Overlays a JSON config onto cfg. Absent keys keep their current value;
/// unknown keys throw ConfigError naming the key.
inline void apply_config(ExperimentConfig &cfg, const json &j)
{
    using detail::read_key;
    detail::check_keys(j,
                       {"network", "n_setups", "n_blocks", "moment_blocks", "combiners", "power_policies", "epsilon",
                        "prelog_form", "eq12_form", "rzf_alpha", "mmse_power_refresh", "output_dir", "master_seed", "workers"},
                       "");
    if (j.contains("network"))
    {
        const json &n = j.at("network");
        detail::check_keys(n,
                           {"L", "N_a", "K", "radius_m", "p_u", "bandwidth_hz", "noise_figure_db", "tau_c", "tau_p", "tau_u",
                            "asd_deg", "seed", "ap_layout", "pathloss"},
                           "network");
        auto &net = cfg.network;
        read_key(n, "L", net.L, "network");
        read_key(n, "N_a", net.N_a, "network");
        read_key(n, "K", net.K, "network");
        read_key(n, "radius_m", net.radius_m, "network");
        read_key(n, "p_u", net.p_u, "network");
        read_key(n, "bandwidth_hz", net.bandwidth_hz, "network");
        read_key(n, "noise_figure_db", net.noise_figure_db, "network");
        read_key(n, "tau_c", net.tau_c, "network");
        read_key(n, "tau_p", net.tau_p, "network");
        read_key(n, "tau_u", net.tau_u, "network");
        read_key(n, "asd_deg", net.asd_deg, "network");
        read_key(n, "seed", net.seed, "network");
        if (n.contains("ap_layout"))
        {
            const auto s = n.at("ap_layout").get<std::string>();
            if (s == "uniform")
                net.ap_layout = ApLayout::uniform;
            else if (s == "grid")
                net.ap_layout = ApLayout::grid;
            else
                throw ConfigError("network.ap_layout", "expected 'uniform' or 'grid'");
        }
        if (n.contains("pathloss"))
        {
            const json &p = n.at("pathloss");
            detail::check_keys(p,
                               {"carrier_mhz", "ap_height_m", "ue_height_m", "d0_m", "d1_m", "min_distance_m", "shadowing",
                                "shadow_std_db"},
                               "network.pathloss");
            auto &pl = net.pathloss;
            const std::string w = "network.pathloss";
            read_key(p, "carrier_mhz", pl.carrier_mhz, w);
            read_key(p, "ap_height_m", pl.ap_height_m, w);
            read_key(p, "ue_height_m", pl.ue_height_m, w);
            read_key(p, "d0_m", pl.d0_m, w);
            read_key(p, "d1_m", pl.d1_m, w);
            read_key(p, "min_distance_m", pl.min_distance_m, w);
            read_key(p, "shadowing", pl.shadowing, w);
            read_key(p, "shadow_std_db", pl.shadow_std_db, w);
        }
    }
    read_key(j, "n_setups", cfg.n_setups, "");
    read_key(j, "n_blocks", cfg.n_blocks, "");
    read_key(j, "moment_blocks", cfg.moment_blocks, "");
    read_key(j, "epsilon", cfg.epsilon, "");
    read_key(j, "mmse_power_refresh", cfg.mmse_power_refresh, "");
    read_key(j, "output_dir", cfg.output_dir, "");
    read_key(j, "master_seed", cfg.master_seed, "");
    read_key(j, "workers", cfg.workers, "");
    if (j.contains("combiners"))
    {
        cfg.combiners.clear();
        for (const auto &c : j.at("combiners"))
        {
            const auto kind = parse_combiner(c.get<std::string>());
            if (!kind)
                throw ConfigError("combiners", "unknown combiner '" + c.get<std::string>() + "'");
            cfg.combiners.push_back(*kind);
        }
    }
    if (j.contains("power_policies"))
    {
        cfg.power_policies.clear();
        for (const auto &p : j.at("power_policies"))
        {
            const auto pol = parse_policy(p.get<std::string>());
            if (!pol)
                throw ConfigError("power_policies", "unknown policy '" + p.get<std::string>() + "'");
            cfg.power_policies.push_back(*pol);
        }
    }
    if (j.contains("prelog_form"))
    {
        const auto s = j.at("prelog_form").get<std::string>();
        if (s == "as-printed")
            cfg.prelog_form = Prelog::as_printed;
        else if (s == "conventional")
            cfg.prelog_form = Prelog::conventional;
        else
            throw ConfigError("prelog_form", "expected 'as-printed' or 'conventional'");
    }
    if (j.contains("eq12_form"))
    {
        const auto s = j.at("eq12_form").get<std::string>();
        if (s == "as-printed")
            cfg.eq12_form = Eq12Form::as_printed;
        else if (s == "standard")
            cfg.eq12_form = Eq12Form::standard;
        else
            throw ConfigError("eq12_form", "expected 'as-printed' or 'standard'");
    }
    if (j.contains("rzf_alpha"))
    {
        if (j.at("rzf_alpha").is_null())
            cfg.rzf_alpha.reset();
        else
            cfg.rzf_alpha = j.at("rzf_alpha").get<double>();
    }
}

inline ExperimentConfig load_config(const std::filesystem::path &path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open " + path.string());
    json j;
    try
    {
        in >> j;
    }
    catch (const json::exception &e)
    {
        throw ConfigError("config", path.string() + ": " + e.what());
    }
    apply_config(base, j);
    return base;
}

inline json to_json(const ExperimentConfig &cfg)
{
    const auto &n = cfg.network;
    const auto &p = n.pathloss;
    json combiners = json::array();
    for (auto c : cfg.combiners)
        combiners.push_back(c.name());
    json policies = json::array();
    for (auto pol : cfg.power_policies)
        policies.push_back(policy_name(pol));
    return json{
        {"network",
         {{"L", n.L},
          {"N_a", n.N_a},
          {"K", n.K},
          {"radius_m", n.radius_m},
          {"p_u", n.p_u},
          {"bandwidth_hz", n.bandwidth_hz},
          {"noise_figure_db", n.noise_figure_db},
          {"tau_c", n.tau_c},
          {"tau_p", n.tau_p},
          {"tau_u", n.tau_u},
          {"asd_deg", n.asd_deg},
          {"seed", n.seed},
          {"ap_layout", n.ap_layout == ApLayout::grid ? "grid" : "uniform"},
          {"pathloss",
           {{"carrier_mhz", p.carrier_mhz},
            {"ap_height_m", p.ap_height_m},
            {"ue_height_m", p.ue_height_m},
            {"d0_m", p.d0_m},
            {"d1_m", p.d1_m},
            {"min_distance_m", p.min_distance_m},
            {"shadowing", p.shadowing},
            {"shadow_std_db", p.shadow_std_db}}}}},
        {"n_setups", cfg.n_setups},
        {"n_blocks", cfg.n_blocks},
        {"moment_blocks", cfg.moment_blocks},
        {"combiners", combiners},
        {"power_policies", policies},
        {"epsilon", cfg.epsilon},
        {"prelog_form", detail::prelog_name(cfg.prelog_form)},
        {"eq12_form", detail::eq12_name(cfg.eq12_form)},
        {"rzf_alpha", cfg.rzf_alpha ? json(*cfg.rzf_alpha) : json(nullptr)},
        {"mmse_power_refresh", cfg.mmse_power_refresh},
        {"output_dir", cfg.output_dir},
        {"master_seed", cfg.master_seed},
        {"workers", cfg.workers}};
}

namespace detail
{

inline std::ofstream open_out(const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

// (combiner, policy) -> values, in first-seen order.
template <class Rec, class Get>
std::vector<std::pair<std::pair<CombinerKind, PowerPolicy>, std::vector<double>>> series(const std::vector<Rec> &rows, Get get)
{
    std::vector<std::pair<std::pair<CombinerKind, PowerPolicy>, std::vector<double>>> out;
    for (const auto &r : rows)
    {
        const auto key = std::make_pair(r.combiner, r.policy);
        auto it = std::find_if(out.begin(), out.end(), [&](const auto &e) { return e.first == key; });
        if (it == out.end())
        {
            out.push_back({key, {}});
            it = std::prev(out.end());
        }
        it->second.push_back(get(r));
    }
    return out;
}

template <class Rec, class Get>
void write_cdf(const std::filesystem::path &path, const std::vector<Rec> &rows, Get get)
{
    auto out = open_out(path);
    out << "combiner,policy,value,probability\n";
    for (const auto &[key, values] : series(rows, get))
        for (const auto &pt : compute_cdf(values))
            out << key.first.name() << ',' << policy_name(key.second) << ',' << format_double(pt.value) << ','
                << format_double(pt.probability) << '\n';
}

} // namespace detail

inline void write_results_csv(const std::filesystem::path &path, const std::vector<ResultRecord> &records)
{
    auto out = detail::open_out(path);
    out << "setup,user,combiner,policy,se,sinr\n";
    for (const auto &r : records)
        out << r.setup << ',' << r.user << ',' << r.combiner.name() << ',' << policy_name(r.policy) << ','
            << format_double(r.se) << ',' << format_double(r.sinr) << '\n';
}

inline void write_capacity_csv(const std::filesystem::path &path, const std::vector<CapacityRecord> &cap)
{
    auto out = detail::open_out(path);
    out << "setup,combiner,policy,capacity_mbps\n";
    for (const auto &c : cap)
        out << c.setup << ',' << c.combiner.name() << ',' << policy_name(c.policy) << ',' << format_double(c.mbps) << '\n';
}

inline void write_costs_csv(const std::filesystem::path &path, const std::vector<CostRecord> &costs)
{
    auto out = detail::open_out(path);
    out << "combiner,processing,complexity,complexity_exact,fronthaul\n";
    for (const auto &c : costs)
        out << c.method.name() << ',' << (c.method.centralized() ? "centralized" : "distributed") << ','
            << format_double(to_double(c.complexity)) << ',' << c.complexity.numerator() << '/' << c.complexity.denominator()
            << ',' << c.fronthaul << '\n';
}

// Post-processing outputs derivable from results.csv alone.
inline void write_derived(const std::filesystem::path &dir, const std::vector<ResultRecord> &records, double bandwidth_hz)
{
    const auto cap = sum_capacity(records, bandwidth_hz);
    write_capacity_csv(dir / "capacity.csv", cap);
    detail::write_cdf(dir / "cdf_se.csv", records, [](const ResultRecord &r) { return r.se; });
    detail::write_cdf(dir / "cdf_capacity.csv", cap, [](const CapacityRecord &r) { return r.mbps; });
}

inline void write_result_set(const ResultSet &rs, const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    write_results_csv(dir / "results.csv", rs.records);
    {
        auto out = detail::open_out(dir / "power.csv");
        out << "setup,user,combiner,policy,eta\n";
        for (const auto &r : rs.records)
            out << r.setup << ',' << r.user << ',' << r.combiner.name() << ',' << policy_name(r.policy) << ','
                << format_double(r.eta) << '\n';
    }
    write_costs_csv(dir / "costs.csv", rs.costs);
    if (!rs.records.empty())
        write_derived(dir, rs.records, rs.config.network.bandwidth_hz);

    json skipped = json::array();
    for (const auto &s : rs.skipped)
        skipped.push_back({{"setup", s.setup}, {"combiner", s.combiner.name()}, {"status", s.reason}});
    json status = json::object();
    for (auto c : rs.config.combiners)
    {
        int n_skip = 0;
        std::string reason;
        for (const auto &s : rs.skipped)
        {
            if (s.combiner != c)
                continue;
            if (n_skip++ == 0)
                reason = s.reason.substr(0, s.reason.find(" ("));
        }
        if (n_skip == 0)
            status[c.name()] = "ok";
        else if (n_skip == rs.config.n_setups)
            status[c.name()] = reason;
        else
            status[c.name()] = reason + " in " + std::to_string(n_skip) + " of " + std::to_string(rs.config.n_setups) + " setups";
    }
    const json manifest{{"config", to_json(rs.config)},
                        {"master_seed", rs.config.master_seed},
                        {"combiner_status", status},
                        {"skipped", skipped},
                        {"warnings", rs.warnings},
                        {"notes", json::array({"complexity counts exclude channel estimation"})}};
    auto out = detail::open_out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

// Reads results.csv back (se and sinr only; eta is left at 1).
inline std::vector<ResultRecord> read_results_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "setup,user,combiner,policy,se,sinr")
        throw ConsistencyError(path.string() + ": unexpected header '" + line + "'");
    std::vector<ResultRecord> out;
    int lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 6)
            throw ConsistencyError(path.string() + ":" + std::to_string(lineno) + ": expected 6 fields");
        const auto kind = parse_combiner(f[2]);
        const auto pol = parse_policy(f[3]);
        if (!kind || !pol)
            throw ConsistencyError(path.string() + ":" + std::to_string(lineno) + ": unknown combiner or policy");
        ResultRecord r;
        r.setup = static_cast<int>(parse_double(f[0]));
        r.user = static_cast<int>(parse_double(f[1]));
        r.combiner = *kind;
        r.policy = *pol;
        r.se = parse_double(f[4]);
        r.sinr = parse_double(f[5]);
        out.push_back(r);
    }
    return out;
}

} // namespace cfmimo
