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

#include "airfl/config.hpp"
#include "airfl/aircomp.hpp"
#include "airfl/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace airfl
{

void TrainConfig::validate() const
{
    detail::require(eta > 0.0, "TrainConfig: eta must be positive");
    detail::require(batch_size >= 1, "TrainConfig: batch_size must be >= 1");
    detail::require(rounds_M >= 1, "TrainConfig: rounds_M must be >= 1");
    detail::require(samples_per_device >= 1, "TrainConfig: samples_per_device must be >= 1");
    detail::require(test_size >= 1, "TrainConfig: test_size must be >= 1");
    detail::require(n_classes >= 2, "TrainConfig: need at least two classes");
    if (task == Task::synthetic_logistic)
        detail::require(n_classes == 2, "TrainConfig: logistic task is binary");
    if (task != Task::mnist_mlp)
        detail::require(n_features >= 1, "TrainConfig: need at least one feature");
}

void SystemConfig::resolve()
{
    detail::require(k_devices >= 1, "SystemConfig: k_devices must be >= 1");
    detail::require(rho > 0.0 && rho <= 1.0, "SystemConfig: rho must lie in (0, 1]");
    if (gamma_th)
        detail::require(*gamma_th > 0.0, "SystemConfig: gamma_th must be positive");
    detail::require(alpha > 0.0, "SystemConfig: alpha must be positive");
    detail::require(p_max > 0.0, "SystemConfig: p_max must be positive");
    detail::require(d_max > 0.0, "SystemConfig: d_max must be positive");
    if (!uniform_distances)
    {
        detail::require(distances.size() == k_devices, "SystemConfig: need one distance per device");
        for (double d : distances)
            detail::require(d > 0.0, "SystemConfig: distances must be positive");
    }
    if (g_bound)
        detail::require(*g_bound > 0.0, "SystemConfig: g_bound must be positive");
    detail::require(workers >= 1, "SystemConfig: workers must be >= 1");
    sigma2_watts = aircomp::dbm_to_watts(sigma2_dbm);
    train.seed = seed;
    train.validate();
}

std::string to_string(Task t)
{
    switch (t)
    {
    case Task::synthetic_logistic:
        return "synthetic_logistic";
    case Task::small_mlp:
        return "small_mlp";
    case Task::mnist_mlp:
        return "mnist_mlp";
    }
    return "?";
}

std::string to_string(Partition p)
{
    return p == Partition::iid ? "iid" : "label_skew";
}

std::string to_string(AggregationMode m)
{
    return m == AggregationMode::ideal ? "ideal" : "aircomp";
}

Task parse_task(const std::string &s)
{
    for (auto t : {Task::synthetic_logistic, Task::small_mlp, Task::mnist_mlp})
        if (s == to_string(t))
            return t;
    throw usage_error("unknown task '" + s + "'");
}

Partition parse_partition(const std::string &s)
{
    if (s == "iid")
        return Partition::iid;
    if (s == "label_skew")
        return Partition::label_skew;
    throw usage_error("unknown partition '" + s + "'");
}

AggregationMode parse_aggregation_mode(const std::string &s)
{
    if (s == "ideal")
        return AggregationMode::ideal;
    if (s == "aircomp")
        return AggregationMode::aircomp;
    throw usage_error("unknown aggregation mode '" + s + "'");
}

// ---- key = value text ------------------------------------------------------

namespace
{
std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &key, const std::string &v)
{
    errno = 0;
    char *end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE)
        throw usage_error("config: '" + key + "' expects a number, got '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string &key, const std::string &v)
{
    errno = 0;
    char *end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE || v[0] == '-')
        throw usage_error("config: '" + key + "' expects a nonnegative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string &key, const std::string &v)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw usage_error("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string &v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

std::vector<double> to_doubles(const std::string &key, const std::string &v)
{
    std::vector<double> out;
    for (const auto &s : split_list(v))
        out.push_back(to_double(key, s));
    return out;
}

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

template <class Seq, class F> std::string join(const Seq &seq, F f)
{
    std::string out;
    for (const auto &x : seq)
    {
        if (!out.empty())
            out += ",";
        out += f(x);
    }
    return out;
}
} // namespace

KeyValues parse_key_values(const std::string &text)
{
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line))
    {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw usage_error("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw usage_error("config line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw usage_error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = trim(t.substr(eq + 1));
    }
    return kv;
}

KeyValues read_key_values(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

void apply_key_values(SystemConfig &cfg, const KeyValues &kv, const std::vector<std::string> &ignored)
{
    auto &tc = cfg.train;
    for (const auto &[key, v] : kv)
    {
        if (std::find(ignored.begin(), ignored.end(), key) != ignored.end())
            continue;
        if (key == "k_devices")
            cfg.k_devices = to_u64(key, v);
        else if (key == "rho")
            cfg.rho = to_double(key, v);
        else if (key == "gamma_th")
            cfg.gamma_th = v == "optimize" ? std::nullopt : std::optional<double>(to_double(key, v));
        else if (key == "threshold_mode")
            cfg.threshold_mode = v;
        else if (key == "alpha")
            cfg.alpha = to_double(key, v);
        else if (key == "p_max")
            cfg.p_max = to_double(key, v);
        else if (key == "sigma2_dbm")
            cfg.sigma2_dbm = to_double(key, v);
        else if (key == "distances")
        {
            // "uniform(0,D]" or an explicit comma-separated list in metres.
            if (v.rfind("uniform(0,", 0) == 0 && v.back() == ']')
            {
                cfg.uniform_distances = true;
                cfg.d_max = to_double(key, v.substr(10, v.size() - 11));
                cfg.distances.clear();
            }
            else
            {
                cfg.uniform_distances = false;
                cfg.distances = to_doubles(key, v);
            }
        }
        else if (key == "g_bound")
            cfg.g_bound = v == "calibrate" ? std::nullopt : std::optional<double>(to_double(key, v));
        else if (key == "g_calibration_factor")
            cfg.g_calibration_factor = to_double(key, v);
        else if (key == "g_calibration_rounds")
            cfg.g_calibration_rounds = to_u64(key, v);
        else if (key == "genie_g")
            cfg.genie_g = to_bool(key, v);
        else if (key == "mode")
            cfg.mode = parse_aggregation_mode(v);
        else if (key == "seed")
            cfg.seed = to_u64(key, v);
        else if (key == "trials")
            cfg.trials = to_u64(key, v);
        else if (key == "workers")
            cfg.workers = to_u64(key, v);
        else if (key == "eta" || key == "train.eta")
            tc.eta = to_double(key, v);
        else if (key == "train.batch_size")
            tc.batch_size = to_u64(key, v);
        else if (key == "train.rounds")
            tc.rounds_M = to_u64(key, v);
        else if (key == "train.task")
            tc.task = parse_task(v);
        else if (key == "train.n_features")
            tc.n_features = to_u64(key, v);
        else if (key == "train.n_classes")
            tc.n_classes = to_u64(key, v);
        else if (key == "train.separation")
            tc.separation = to_double(key, v);
        else if (key == "train.samples_per_device")
            tc.samples_per_device = to_u64(key, v);
        else if (key == "train.test_size")
            tc.test_size = to_u64(key, v);
        else if (key == "train.partition")
            tc.partition = parse_partition(v);
        else if (key == "train.hidden")
            tc.hidden = to_u64(key, v);
        else if (key == "train.idx_train_images")
            tc.idx_train_images = v;
        else if (key == "train.idx_train_labels")
            tc.idx_train_labels = v;
        else if (key == "train.idx_test_images")
            tc.idx_test_images = v;
        else if (key == "train.idx_test_labels")
            tc.idx_test_labels = v;
        else if (key == "verify.rhos")
            cfg.verify_rhos = to_doubles(key, v);
        else if (key == "verify.gammas")
            cfg.verify_gammas = to_doubles(key, v);
        else if (key == "pdf.t_range")
        {
            const auto r = to_doubles(key, v);
            if (r.size() != 2 || !(r[0] < r[1]))
                throw usage_error("config: pdf.t_range expects 'lo,hi'");
            cfg.pdf_t_min = r[0];
            cfg.pdf_t_max = r[1];
        }
        else if (key == "pdf.gamma_range")
        {
            const auto r = to_doubles(key, v);
            if (r.size() != 2 || !(r[0] < r[1]) || r[1] >= 0.0)
                throw usage_error("config: pdf.gamma_range expects 'lo,hi' with hi < 0");
            cfg.pdf_gamma_min = r[0];
            cfg.pdf_gamma_max = r[1];
        }
        else if (key == "pdf.bins")
        {
            const auto parts = split_list(v);
            if (parts.size() != 2)
                throw usage_error("config: pdf.bins expects 'n_t,n_gamma'");
            cfg.pdf_bins_t = to_u64(key, parts[0]);
            cfg.pdf_bins_gamma = to_u64(key, parts[1]);
        }
        else if (key == "pdf.tail_gamma")
            cfg.pdf_tail_gamma = to_double(key, v);
        else if (key == "divergence.k_sweep")
        {
            cfg.divergence_k_sweep.clear();
            for (const auto &s : split_list(v))
                cfg.divergence_k_sweep.push_back(to_u64(key, s));
        }
        else if (key == "sweep.gammas")
            cfg.sweep_gammas = to_doubles(key, v);
        else if (key == "sweep.modes")
            cfg.sweep_modes = split_list(v);
        else if (key == "sweep.seeds")
            cfg.sweep_seeds = to_u64(key, v);
        else if (key == "sweep.fixed_gamma")
            cfg.sweep_fixed_gamma = to_double(key, v);
        else if (key == "lipschitz_L")
            cfg.lipschitz_L = v == "none" ? std::nullopt : std::optional<double>(to_double(key, v));
        else
            throw usage_error("config: unknown key '" + key + "'");
    }
}

KeyValues to_key_values(const SystemConfig &cfg)
{
    const auto &tc = cfg.train;
    auto u = [](std::uint64_t x) { return std::to_string(x); };
    KeyValues kv;
    kv["k_devices"] = u(cfg.k_devices);
    kv["rho"] = fmt(cfg.rho);
    kv["gamma_th"] = cfg.gamma_th ? fmt(*cfg.gamma_th) : "optimize";
    kv["threshold_mode"] = cfg.threshold_mode;
    kv["alpha"] = fmt(cfg.alpha);
    kv["p_max"] = fmt(cfg.p_max);
    kv["sigma2_dbm"] = fmt(cfg.sigma2_dbm);
    kv["distances"] = cfg.uniform_distances ? "uniform(0," + fmt(cfg.d_max) + "]" : join(cfg.distances, fmt);
    kv["g_bound"] = cfg.g_bound ? fmt(*cfg.g_bound) : "calibrate";
    kv["g_calibration_factor"] = fmt(cfg.g_calibration_factor);
    kv["g_calibration_rounds"] = u(cfg.g_calibration_rounds);
    kv["genie_g"] = cfg.genie_g ? "true" : "false";
    kv["mode"] = to_string(cfg.mode);
    kv["seed"] = u(cfg.seed);
    kv["trials"] = u(cfg.trials);
    kv["workers"] = u(cfg.workers);
    kv["train.eta"] = fmt(tc.eta);
    kv["train.batch_size"] = u(tc.batch_size);
    kv["train.rounds"] = u(tc.rounds_M);
    kv["train.task"] = to_string(tc.task);
    kv["train.n_features"] = u(tc.n_features);
    kv["train.n_classes"] = u(tc.n_classes);
    kv["train.separation"] = fmt(tc.separation);
    kv["train.samples_per_device"] = u(tc.samples_per_device);
    kv["train.test_size"] = u(tc.test_size);
    kv["train.partition"] = to_string(tc.partition);
    kv["train.hidden"] = u(tc.hidden);
    if (tc.task == Task::mnist_mlp)
    {
        kv["train.idx_train_images"] = tc.idx_train_images;
        kv["train.idx_train_labels"] = tc.idx_train_labels;
        kv["train.idx_test_images"] = tc.idx_test_images;
        kv["train.idx_test_labels"] = tc.idx_test_labels;
    }
    kv["verify.rhos"] = join(cfg.verify_rhos, fmt);
    kv["verify.gammas"] = join(cfg.verify_gammas, fmt);
    kv["pdf.t_range"] = fmt(cfg.pdf_t_min) + "," + fmt(cfg.pdf_t_max);
    kv["pdf.gamma_range"] = fmt(cfg.pdf_gamma_min) + "," + fmt(cfg.pdf_gamma_max);
    kv["pdf.bins"] = u(cfg.pdf_bins_t) + "," + u(cfg.pdf_bins_gamma);
    kv["pdf.tail_gamma"] = fmt(cfg.pdf_tail_gamma);
    kv["divergence.k_sweep"] = join(cfg.divergence_k_sweep, [](std::size_t k) { return std::to_string(k); });
    kv["sweep.gammas"] = join(cfg.sweep_gammas, fmt);
    kv["sweep.modes"] = join(cfg.sweep_modes, [](const std::string &s) { return s; });
    kv["sweep.seeds"] = u(cfg.sweep_seeds);
    kv["sweep.fixed_gamma"] = fmt(cfg.sweep_fixed_gamma);
    kv["lipschitz_L"] = cfg.lipschitz_L ? fmt(*cfg.lipschitz_L) : "none";
    return kv;
}

std::string format_key_values(const KeyValues &kv)
{
    std::string out;
    for (const auto &[k, v] : kv)
        out += k + " = " + v + "\n";
    return out;
}

} // namespace airfl
