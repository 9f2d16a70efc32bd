// SPDX-License-Identifier: Apache-2.0
//
// airfl: over-the-air federated learning under imperfect CSI
// Copyright (C) 2026 The airfl authors
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

// Command line front end: runs one experiment, writes <out>/<table>.csv and its
// manifest, or replays a manifest and checks the CSV hash.

#include "airfl/config.hpp"
#include "airfl/error.hpp"
#include "airfl/harness.hpp"
#include "airfl/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace airfl;

namespace
{
struct Common
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> workers;
    std::string out_dir = "airfl_out";
    std::string format = "csv";
};

void add_common(CLI::App *app, Common &c, bool with_config)
{
    if (with_config)
        app->add_option("--config", c.config_path, "Key-value config file");
    app->add_option("--seed", c.seed, "Master seed");
    app->add_option("--trials", c.trials, "Monte Carlo trials (0 = command default)");
    app->add_option("--workers", c.workers, "Worker threads; results do not depend on it");
    app->add_option("--out", c.out_dir, "Output directory");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv"}));
}

void apply_overrides(SystemConfig &cfg, const Common &c)
{
    if (c.seed)
        cfg.seed = *c.seed;
    if (c.trials)
        cfg.trials = *c.trials;
    if (c.workers)
        cfg.workers = *c.workers;
}

void print_summary(const report::SweepResult &r)
{
    std::cout << "label";
    for (const auto &col : r.columns)
        std::cout << '\t' << col;
    std::cout << '\n';
    const std::size_t shown = std::min<std::size_t>(r.rows.size(), 40);
    for (std::size_t i = 0; i < shown; ++i)
    {
        std::cout << r.rows[i].label;
        for (double v : r.rows[i].values)
        {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", v);
            std::cout << '\t' << buf;
        }
        std::cout << '\n';
    }
    if (shown < r.rows.size())
        std::cout << "... " << r.rows.size() - shown << " more rows in the CSV\n";
}

int run(const std::string &command, SystemConfig cfg, const Common &c)
{
    bool passed = true;
    const auto table = harness::run_command(command, cfg, &passed);
    const auto files = report::write_report(table, c.out_dir, command, cfg, c.format);
    print_summary(table);
    std::cout << "wrote " << files.csv_path << " and " << files.manifest_path << '\n';
    if (!passed)
    {
        std::cerr << command << ": a Monte Carlo check failed the 4-SE rule (see the CSV)\n";
        return 2;
    }
    return 0;
}
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"airfl: over-the-air federated learning under imperfect CSI"};
    app.require_subcommand(1);

    std::vector<std::pair<std::string, CLI::App *>> experiments;
    Common common;
    const std::vector<std::pair<std::string, std::string>> help{
        {"verify-xi", "Moments of the effective coefficient vs closed form"},
        {"verify-pdf", "Histogram of (x, y) vs the joint density"},
        {"verify-divergence", "Frozen-round divergence vs the exact value and the K sweep"},
        {"optimize-threshold", "Optimal truncation threshold per mode"},
        {"sweep-threshold", "Federated training across thresholds and modes"},
        {"train", "Single federated training run"},
    };
    for (const auto &[name, text] : help)
    {
        auto *sub = app.add_subcommand(name, text);
        add_common(sub, common, true);
        experiments.emplace_back(name, sub);
    }

    std::string manifest;
    auto *replay = app.add_subcommand("replay", "Re-run a manifest and compare the CSV hash");
    replay->add_option("manifest", manifest, "Manifest written by an earlier run")->required();
    add_common(replay, common, false);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (replay->parsed())
        {
            const auto kv = read_key_values(manifest);
            if (!kv.count("command") || !kv.count("csv_sha1"))
                throw usage_error("manifest lacks command or csv_sha1");
            SystemConfig cfg;
            apply_key_values(cfg, kv, report::manifest_metadata_keys());
            if (common.workers)
                cfg.workers = *common.workers;
            const std::string command = kv.at("command");
            bool passed = true;
            const auto table = harness::run_command(command, cfg, &passed);
            const std::string format = kv.count("format") ? kv.at("format") : "csv";
            const auto files = report::write_report(table, common.out_dir, command, cfg, format);
            const bool same = files.csv_hash == kv.at("csv_sha1");
            std::cout << "replayed " << command << ": csv sha1 " << files.csv_hash
                      << (same ? " matches the manifest\n" : " DIFFERS from the manifest\n");
            return same ? 0 : 3;
        }
        for (const auto &[name, sub] : experiments)
        {
            if (!sub->parsed())
                continue;
            SystemConfig cfg;
            if (!common.config_path.empty())
                apply_key_values(cfg, read_key_values(common.config_path), report::manifest_metadata_keys());
            apply_overrides(cfg, common);
            return run(name, cfg, common);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "airfl: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
