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

// Command line driver: run experiments, print cost tables, post-process results.

#include <cfmimo/cfmimo.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace cfmimo;

namespace
{

struct Options
{
    std::string config;
    std::string out;
    std::string profile = "desk";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool verbose = false;
    int workers = -1;
};

ExperimentConfig resolve(const Options &o)
{
    ExperimentConfig cfg = o.profile == "paper" ? paper_profile() : desk_profile();
    if (!o.config.empty())
        cfg = load_config(o.config, cfg);
    if (o.seed_given)
        cfg.master_seed = o.seed;
    if (!o.out.empty())
        cfg.output_dir = o.out;
    if (o.workers >= 0)
        cfg.workers = o.workers;
    return cfg;
}

void print_costs(std::ostream &os, const ExperimentConfig &cfg, const std::vector<CostRecord> &rows)
{
    const auto &n = cfg.network;
    os << "L=" << n.L << " N_a=" << n.N_a << " M=" << n.M() << " K=" << n.K << " tau_p=" << n.tau_p << " tau_u=" << n.tau_u
       << '\n';
    os << std::left << std::setw(12) << "combiner" << std::right << std::setw(16) << "mult/use" << std::setw(14) << "fronthaul"
       << '\n';
    for (const auto &r : rows)
        os << std::left << std::setw(12) << r.method.name() << std::right << std::setw(16) << std::fixed << std::setprecision(2)
           << to_double(r.complexity) << std::setw(14) << r.fronthaul << '\n';
    os.unsetf(std::ios::floatfield);
    os << "complexity excludes channel estimation; fronthaul in complex scalars per coherence block\n";
}

int cmd_run(const Options &o)
{
    const ExperimentConfig cfg = resolve(o);
    for (const auto &w : cfg.network.warnings())
        std::cerr << "warning: " << w << '\n';
    const ResultSet rs = run_experiment(cfg, o.verbose);
    if (o.verbose)
        std::cerr << rs.trace;
    write_result_set(rs, cfg.output_dir);
    std::cout << "wrote " << rs.records.size() << " records to " << cfg.output_dir << '\n';
    for (const auto &s : rs.skipped)
        if (s.setup == 0)
            std::cout << s.combiner.name() << ": " << s.reason << '\n';
    return 0;
}

int cmd_costs(const Options &o)
{
    const ExperimentConfig cfg = resolve(o);
    const auto &n = cfg.network;
    const auto rows = cost_table(n.L, n.N_a, n.K, n.tau_p, n.tau_u);
    print_costs(std::cout, cfg, rows);
    if (!o.out.empty())
    {
        fs::create_directories(o.out);
        write_costs_csv(fs::path(o.out) / "costs.csv", rows);
    }
    return 0;
}

// Rebuilds capacity.csv and the cdf files from an existing results.csv.
int cmd_cdf(const Options &o, const std::string &in_dir)
{
    const fs::path dir = in_dir;
    double bandwidth = resolve(o).network.bandwidth_hz;
    if (std::ifstream mf(dir / "manifest.json"); mf)
    {
        const json m = json::parse(mf);
        bandwidth = m.at("config").at("network").at("bandwidth_hz").get<double>();
    }
    const auto records = read_results_csv(dir / "results.csv");
    const fs::path out = o.out.empty() ? dir : fs::path(o.out);
    fs::create_directories(out);
    write_derived(out, records, bandwidth);
    std::cout << "wrote capacity.csv, cdf_se.csv, cdf_capacity.csv to " << out.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Uplink cell-free massive MIMO simulator"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--config", o.config, "JSON config file overlaid on the profile")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--profile", o.profile, "base profile")->check(CLI::IsMember({"paper", "desk"}));
        sub->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t &s)
            {
                o.seed = s;
                o.seed_given = true;
            },
            "master seed");
        sub->add_flag("--verbose", o.verbose, "dump bisection traces to stderr");
    };

    auto *run = app.add_subcommand("run", "Monte-Carlo evaluation of all configured combiners");
    add_common(run);
    run->add_option("--workers", o.workers, "worker threads (0 = hardware concurrency)");

    auto *costs = app.add_subcommand("costs", "complexity and fronthaul table");
    add_common(costs);

    std::string in_dir = ".";
    auto *cdf = app.add_subcommand("cdf", "capacity and CDF files from an existing results.csv");
    add_common(cdf);
    cdf->add_option("--in", in_dir, "directory containing results.csv")->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
            return cmd_run(o);
        if (*costs)
            return cmd_costs(o);
        if (*cdf)
            return cmd_cdf(o, in_dir);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
