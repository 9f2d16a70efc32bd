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

#include "airfl/analysis.hpp"
#include "airfl/error.hpp"
#include "airfl/specfun.hpp"

#include <cmath>
#include <numbers>

namespace airfl::analysis
{

namespace
{
void check_gamma_rho(double gamma_th, double rho, const char *who)
{
    detail::require(gamma_th > 0.0 && std::isfinite(gamma_th), std::string(who) + ": gamma_th must be positive");
    detail::require(rho > 0.0 && rho <= 1.0, std::string(who) + ": rho must lie in (0, 1]");
}

double ei_coefficient(double rho)
{
    // Exactly zero at rho = 1.
    return (1.0 - rho * rho) / (2.0 * rho * rho);
}
} // namespace

void LearningConstants::validate() const
{
    detail::require(lipschitz_L > 0.0, "LearningConstants: L must be positive");
    detail::require(eta > 0.0, "LearningConstants: eta must be positive");
    detail::require(delta2 >= 0.0 && g_bound2 >= 0.0, "LearningConstants: variance bounds must be nonnegative");
    detail::require(rounds_M >= 1, "LearningConstants: need at least one round");
    if (!(eta < 2.0 / lipschitz_L))
        throw domain_error("LearningConstants: learning rate must satisfy eta < 2/L");
}

double xi_variance(double gamma_th, double rho)
{
    check_gamma_rho(gamma_th, rho, "xi_variance");
    const double k1 = ei_coefficient(rho);
    const double ei_term = k1 == 0.0 ? 0.0 : k1 * specfun::exp_integral_ei(-gamma_th) * std::exp(2.0 * gamma_th);
    return std::expm1(gamma_th) - ei_term;
}

double divergence_bound(std::size_t k_devices, double gamma_th, double rho, const aircomp::PowerConfig &cfg)
{
    check_gamma_rho(gamma_th, rho, "divergence_bound");
    detail::require(k_devices >= 1, "divergence_bound: need at least one device");
    cfg.validate();
    const double k = static_cast<double>(k_devices);
    const double noise = cfg.sigma2 * cfg.d_max_alpha * std::exp(2.0 * gamma_th) /
                         (2.0 * cfg.p_max * rho * rho * gamma_th);
    return cfg.g_bound * cfg.g_bound / (k * k) * (xi_variance(gamma_th, rho) + noise);
}

double noise_energy(std::size_t k_devices, double gamma_th, double rho, const aircomp::PowerConfig &cfg,
                    std::size_t d_model)
{
    const double zeta = aircomp::scaling_zeta(k_devices, rho, cfg, gamma_th);
    return static_cast<double>(d_model) * cfg.sigma2 / (2.0 * zeta * zeta);
}

double divergence_exact(std::span<const double> per_device_grad_sq, std::size_t k_devices, double gamma_th,
                        double rho, const aircomp::PowerConfig &cfg, std::size_t d_model)
{
    check_gamma_rho(gamma_th, rho, "divergence_exact");
    if (per_device_grad_sq.size() != k_devices)
        throw usage_error("divergence_exact: need one gradient energy per device");
    detail::require(d_model >= 1, "divergence_exact: d_model must be positive");
    double energy = 0.0;
    for (double e : per_device_grad_sq)
    {
        detail::require(e >= 0.0, "divergence_exact: gradient energies must be nonnegative");
        energy += e;
    }
    const double k = static_cast<double>(k_devices);
    return xi_variance(gamma_th, rho) * energy / (k * k) + noise_energy(k_devices, gamma_th, rho, cfg, d_model);
}

double convergence_bound(const LearningConstants &lc, double delta2_total)
{
    lc.validate();
    detail::require(delta2_total >= 0.0, "convergence_bound: delta2_total must be nonnegative");
    const double L = lc.lipschitz_L;
    const double eta = lc.eta;
    return lc.f0_minus_fM / (static_cast<double>(lc.rounds_M) * (eta - L * eta * eta / 2.0)) +
           L * eta * delta2_total / (2.0 - L * eta);
}

double joint_cdf_xy(double t, double gamma)
{
    detail::require(std::isfinite(t) && std::isfinite(gamma), "joint_cdf_xy: arguments must be finite");
    const double s = std::sqrt(1.0 + t * t);
    if (specfun::heaviside(-gamma) == 0.0)
        return 0.5 + t / (2.0 * s);
    const double a = std::sqrt(-gamma);
    return t / (2.0 * s) * specfun::erfc(a * s) + 0.5 * std::exp(gamma) * specfun::erfc(-a * t);
}

double joint_pdf_xy(double t, double gamma)
{
    detail::require(std::isfinite(t) && std::isfinite(gamma), "joint_pdf_xy: arguments must be finite");
    if (specfun::heaviside(-gamma) == 0.0)
        return 0.0;
    return std::sqrt(-gamma / std::numbers::pi) * std::exp(gamma * (1.0 + t * t));
}

double conditional_second_moment(double gamma_th, double c)
{
    detail::require(gamma_th > 0.0, "conditional_second_moment: gamma_th must be positive");
    return c * c - 0.5 * specfun::exp_integral_ei(-gamma_th) * std::exp(gamma_th);
}

double offset_c(double gamma_th, double rho)
{
    check_gamma_rho(gamma_th, rho, "offset_c");
    if (rho == 1.0)
        throw domain_error("offset_c: undefined for perfect CSI (rho = 1)");
    return -rho * std::expm1(gamma_th) / (std::exp(gamma_th) * std::sqrt(1.0 - rho * rho));
}

ClosedFormReport closed_form_report(std::span<const double> per_device_grad_sq, double gamma_th, double rho,
                                    const aircomp::PowerConfig &cfg, std::size_t d_model,
                                    const std::optional<LearningConstants> &lc)
{
    const std::size_t k = per_device_grad_sq.size();
    ClosedFormReport r;
    r.lambda = aircomp::compensation_lambda(gamma_th, rho);
    r.xi_variance = xi_variance(gamma_th, rho);
    r.divergence_bound = divergence_bound(k, gamma_th, rho, cfg);
    r.divergence_exact = divergence_exact(per_device_grad_sq, k, gamma_th, rho, cfg, d_model);
    r.bound_violated = r.divergence_exact > r.divergence_bound;
    if (lc)
        r.convergence_bound = convergence_bound(*lc, r.divergence_exact + lc->delta2);
    return r;
}

} // namespace airfl::analysis
