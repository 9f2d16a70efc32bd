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

#ifndef AIRFL_ANALYSIS_HPP
#define AIRFL_ANALYSIS_HPP

#include "airfl/aircomp.hpp"

#include <cstddef>
#include <optional>
#include <span>

namespace airfl::analysis
{

/// Constants entering the non-convex convergence bound. eta < 2 / L is required.
struct LearningConstants
{
    double lipschitz_L = 1.0;
    double eta = 0.005;
    double delta2 = 0.0;
    double g_bound2 = 1.0;
    std::size_t rounds_M = 1;
    double f0_minus_fM = 0.0;

    void validate() const;
};

struct ClosedFormReport
{
    double lambda = 0.0;
    double xi_variance = 0.0;
    // Closed-form weight-divergence bound with the G^2/K^2 prefactor on both terms.
    double divergence_bound = 0.0;
    // Exact E||g_hat - g||^2 for the given per-device gradient energies.
    double divergence_exact = 0.0;
    // Set when divergence_exact exceeds divergence_bound.
    bool bound_violated = false;
    std::optional<double> convergence_bound;
};

// E[(xi - 1)^2] = e^g - (1 - rho^2)/(2 rho^2) Ei(-g) e^{2g} - 1.
double xi_variance(double gamma_th, double rho);

double divergence_bound(std::size_t k_devices, double gamma_th, double rho, const aircomp::PowerConfig &cfg);

// d_model * sigma2 / (2 zeta^2)
double noise_energy(std::size_t k_devices, double gamma_th, double rho, const aircomp::PowerConfig &cfg,
                    std::size_t d_model);

/// (1/K^2) sum_k Var[xi] E||g_k||^2 + d_model sigma2 / (2 zeta^2).
double divergence_exact(std::span<const double> per_device_grad_sq, std::size_t k_devices, double gamma_th,
                        double rho, const aircomp::PowerConfig &cfg, std::size_t d_model);

double convergence_bound(const LearningConstants &lc, double delta2_total);

// Joint CDF of x = Re{v* h_hat}/|h_hat|^2 and y = -|h_hat|^2.
// For gamma >= 0 the event y < gamma is certain and this returns the marginal
// CDF of x, 1/2 + t / (2 sqrt(1 + t^2)).
double joint_cdf_xy(double t, double gamma);

// sqrt(-gamma/pi) exp(gamma (1 + t^2)) for gamma < 0, zero otherwise.
double joint_pdf_xy(double t, double gamma);

// E[(x - c)^2 | y <= -gamma_th] = c^2 - Ei(-gamma_th) e^{gamma_th} / 2.
double conditional_second_moment(double gamma_th, double c);

// Centering offset c = rho (1 - e^g) / (e^g sqrt(1 - rho^2)); requires rho < 1.
double offset_c(double gamma_th, double rho);

ClosedFormReport closed_form_report(std::span<const double> per_device_grad_sq, double gamma_th, double rho,
                                    const aircomp::PowerConfig &cfg, std::size_t d_model,
                                    const std::optional<LearningConstants> &lc = std::nullopt);

} // namespace airfl::analysis

#endif
