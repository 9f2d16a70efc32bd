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

#include "airfl/aircomp.hpp"
#include "airfl/error.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace airfl::aircomp
{

void PowerConfig::validate() const
{
    detail::require(p_max > 0.0, "PowerConfig: p_max must be positive");
    detail::require(sigma2 >= 0.0, "PowerConfig: sigma2 must be nonnegative");
    detail::require(g_bound > 0.0, "PowerConfig: g_bound must be positive");
    detail::require(d_max_alpha > 0.0, "PowerConfig: d_max_alpha must be positive");
}

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double compensation_lambda(double gamma_th, double rho)
{
    detail::require(gamma_th > 0.0, "compensation_lambda: gamma_th must be positive");
    detail::require(rho > 0.0 && rho <= 1.0, "compensation_lambda: rho must lie in (0, 1]");
    return std::exp(gamma_th) / rho;
}

double effective_xi(const channel::ChannelDraw &draw, double gamma_th, double lambda)
{
    detail::require(lambda > 0.0, "effective_xi: lambda must be positive");
    if (!channel::is_active(draw.h_hat, gamma_th))
        return 0.0;
    const double gain = std::norm(draw.h_hat);
    if (gain == 0.0)
        throw std::logic_error("effective_xi: active device with zero channel estimate");
    return lambda * std::real(std::conj(draw.h) * draw.h_hat) / gain;
}

double scaling_zeta(std::size_t k_devices, double rho, const PowerConfig &cfg, double gamma_th)
{
    detail::require(k_devices >= 1, "scaling_zeta: need at least one device");
    detail::require(rho > 0.0 && rho <= 1.0, "scaling_zeta: rho must lie in (0, 1]");
    detail::require(gamma_th > 0.0, "scaling_zeta: gamma_th must be positive");
    cfg.validate();
    return static_cast<double>(k_devices) * rho * std::sqrt(cfg.p_max * gamma_th) /
           (cfg.g_bound * std::sqrt(cfg.d_max_alpha) * std::exp(gamma_th));
}

std::complex<double> preprocessing_beta(const channel::ChannelDraw &draw, double zeta, double lambda,
                                        std::size_t k_devices, double alpha)
{
    const double gain = std::norm(draw.h_hat);
    detail::require(gain > 0.0, "preprocessing_beta: channel estimate is zero");
    detail::require(k_devices >= 1, "preprocessing_beta: need at least one device");
    const double scale = zeta * lambda * std::pow(draw.d, alpha / 2.0) / (static_cast<double>(k_devices) * gain);
    return scale * std::conj(draw.h_hat);
}

double squared_norm(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return s;
}

AggregationOutcome aggregate(std::span<const Vec> gradients, std::span<const channel::ChannelDraw> draws,
                             double gamma_th, double rho, const PowerConfig &cfg, RngStream &rng,
                             const AggregateOptions &opts)
{
    const std::size_t k = gradients.size();
    if (k == 0)
        throw usage_error("aggregate: no gradients");
    if (draws.size() != k)
        throw usage_error("aggregate: " + std::to_string(draws.size()) + " channel draws for " +
                          std::to_string(k) + " gradients");
    const std::size_t dim = gradients[0].size();
    if (dim == 0)
        throw usage_error("aggregate: empty gradient vectors");
    for (const auto &g : gradients)
        if (g.size() != dim)
            throw usage_error("aggregate: gradient dimension mismatch");

    AggregationOutcome out;
    out.lambda = compensation_lambda(gamma_th, rho);
    out.zeta = scaling_zeta(k, rho, cfg, gamma_th);
    out.xi.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
    {
        if (!opts.force_unit_xi && !channel::is_active(draws[i].h_hat, gamma_th))
            continue;
        out.active_set.push_back(i);
        out.xi[i] = opts.force_unit_xi ? 1.0 : effective_xi(draws[i], gamma_th, out.lambda);
    }

    // Re{z} / zeta with z ~ CN(0, sigma2 I): per-entry std sqrt(sigma2 / 2) / zeta.
    const double noise_std = std::sqrt(cfg.sigma2 / 2.0) / out.zeta;
    out.noise_realization.resize(dim);
    for (auto &z : out.noise_realization)
        z = noise_std * rng.normal();

    out.estimate.assign(dim, 0.0);
    const double kd = static_cast<double>(k);
    for (std::size_t j = 0; j < dim; ++j)
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            acc += out.xi[i] * gradients[i][j];
        out.estimate[j] = acc / kd + out.noise_realization[j];
    }

    out.skipped = out.active_set.empty();
    out.g_hat = out.skipped ? Vec(dim, 0.0) : out.estimate;
    return out;
}

} // namespace airfl::aircomp
