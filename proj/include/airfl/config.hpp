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

#ifndef AIRFL_CONFIG_HPP
#define AIRFL_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace airfl
{

enum class Task
{
    synthetic_logistic,
    small_mlp,
    mnist_mlp,
};

enum class Partition
{
    iid,
    label_skew,
};

enum class AggregationMode
{
    ideal,
    aircomp,
};

struct TrainConfig
{
    double eta = 0.005;
    std::size_t batch_size = 32;
    std::size_t rounds_M = 200;
    Task task = Task::synthetic_logistic;
    std::uint64_t seed = 1;

    // Synthetic blobs: n_features inputs; logistic d_model = n_features + 1.
    std::size_t n_features = 9;
    std::size_t n_classes = 2;
    double separation = 2.0;
    std::size_t samples_per_device = 200;
    std::size_t test_size = 1000;
    Partition partition = Partition::iid;
    std::size_t hidden = 16;

    // IDX files for the mnist_mlp task.
    std::string idx_train_images;
    std::string idx_train_labels;
    std::string idx_test_images;
    std::string idx_test_labels;

    void validate() const;
};

/// Every physical and learning parameter of one experiment. Defaults follow the
/// reference setup: K = 10, alpha = 2.2, P_max = 0.1 W, sigma^2 = -40 dBm,
/// eta = 0.005, distances uniform on (0, 500] m.
struct SystemConfig
{
    std::size_t k_devices = 10;
    double rho = 0.8;
    std::optional<double> gamma_th; // nullopt: optimise with threshold_mode
    std::string threshold_mode = "joint";
    double alpha = 2.2;
    double p_max = 0.1;
    double sigma2_dbm = -40.0;
    double sigma2_watts = 1e-7; // derived once in resolve()

    bool uniform_distances = true;
    double d_max = 500.0;
    std::vector<double> distances;

    std::optional<double> g_bound; // nullopt: calibrate from an ideal warm-up
    double g_calibration_factor = 1.1;
    std::size_t g_calibration_rounds = 10;
    bool genie_g = false;

    AggregationMode mode = AggregationMode::aircomp;
    TrainConfig train;

    std::uint64_t seed = 1;
    std::size_t trials = 0; // 0: command-specific default
    std::size_t workers = 1;

    // verify-xi
    std::vector<double> verify_rhos{0.5, 0.8, 0.95, 1.0};
    std::vector<double> verify_gammas{0.1, 0.5, 1.0, 2.0};

    // verify-pdf
    double pdf_t_min = -3.0, pdf_t_max = 3.0;
    double pdf_gamma_min = -4.0, pdf_gamma_max = -0.1;
    std::size_t pdf_bins_t = 40, pdf_bins_gamma = 40;
    double pdf_tail_gamma = 1.0;

    // verify-divergence
    std::vector<std::size_t> divergence_k_sweep{5, 10, 20, 40};

    // sweep-threshold
    std::vector<double> sweep_gammas{0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    std::vector<std::string> sweep_modes{"joint", "communication_oriented", "computation_oriented", "fixed"};
    std::size_t sweep_seeds = 3;
    double sweep_fixed_gamma = 1.0;

    // Optional smoothness constant for reporting the convergence bound.
    std::optional<double> lipschitz_L;

    // Converts sigma2_dbm to watts and checks every field. Idempotent.
    void resolve();
};

std::string to_string(Task t);
std::string to_string(Partition p);
std::string to_string(AggregationMode m);
Task parse_task(const std::string &s);
Partition parse_partition(const std::string &s);
AggregationMode parse_aggregation_mode(const std::string &s);

/// Flat "key = value" text. Lines starting with '#' and blank lines are ignored.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string &text);
KeyValues read_key_values(const std::string &path);

// Applies known keys onto cfg; unknown keys throw usage_error unless listed in \p ignored.
void apply_key_values(SystemConfig &cfg, const KeyValues &kv, const std::vector<std::string> &ignored = {});

// Full, resolved serialisation; apply_key_values on the result reproduces cfg.
KeyValues to_key_values(const SystemConfig &cfg);
std::string format_key_values(const KeyValues &kv);

} // namespace airfl

#endif
