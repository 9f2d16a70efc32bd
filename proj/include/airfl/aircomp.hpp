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

#ifndef AIRFL_AIRCOMP_HPP
#define AIRFL_AIRCOMP_HPP

#include "airfl/channel.hpp"
#include "airfl/rng.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace airfl::aircomp
{

using Vec = std::vector<double>;

struct PowerConfig
{
    double p_max = 0.1;       // W
    double sigma2 = 1e-7;     // W
    double g_bound = 1.0;     // gradient-norm bound G
    double d_max_alpha = 1.0; // max_k d_k^alpha

    void validate() const;
};

double dbm_to_watts(double dbm);

struct AggregationOutcome
{
    // Gradient handed to the global update; zero when the round is skipped.
    Vec g_hat;
    // (1/K) sum_k xi_k g_k + noise, always populated. Equals g_hat unless skipped.
    Vec estimate;
    std::vector<std::size_t> active_set;
    Vec xi;
    Vec noise_realization;
    double zeta = 0.0;
    double lambda = 0.0;
    bool skipped = false;
};

// e^{gamma_th} / rho: makes the truncated, mismatched inversion unbiased.
double compensation_lambda(double gamma_th, double rho);

double effective_xi(const channel::ChannelDraw &draw, double gamma_th, double lambda);

// Power-normalisation factor that keeps ||beta_k g_k||^2 <= P_max for every
// active device whenever ||g_k|| <= G.
double scaling_zeta(std::size_t k_devices, double rho, const PowerConfig &cfg, double gamma_th);

std::complex<double> preprocessing_beta(const channel::ChannelDraw &draw, double zeta, double lambda,
                                        std::size_t k_devices, double alpha);

struct AggregateOptions
{
    // Test hook: every device contributes with xi = 1, truncation bypassed.
    bool force_unit_xi = false;
};

/// Over-the-air aggregation of K local gradients through one channel
/// realization per device. Receiver noise has per-entry variance
/// sigma2 / (2 zeta^2) and is drawn from \p rng (d_model normals, always).
/// An empty active set marks the outcome skipped and zeroes g_hat.
AggregationOutcome aggregate(std::span<const Vec> gradients, std::span<const channel::ChannelDraw> draws,
                             double gamma_th, double rho, const PowerConfig &cfg, RngStream &rng,
                             const AggregateOptions &opts = {});

double squared_norm(std::span<const double> v);

} // namespace airfl::aircomp

#endif
