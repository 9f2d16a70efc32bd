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

#include "airfl/channel.hpp"
#include "airfl/error.hpp"

#include <algorithm>
#include <cmath>

namespace airfl::channel
{

void EstimationModel::validate() const
{
    detail::require(rho > 0.0 && rho <= 1.0, "EstimationModel: rho must lie in (0, 1]");
    detail::require(alpha > 0.0, "EstimationModel: alpha must be positive");
}

ChannelDraw draw_channel(const EstimationModel &model, double d, RngStream &rng)
{
    model.validate();
    detail::require(d > 0.0, "draw_channel: distance must be positive");

    ChannelDraw out;
    out.h_hat = rng.complex_normal();
    out.v = rng.complex_normal();
    out.h = model.rho * out.h_hat + std::sqrt(1.0 - model.rho * model.rho) * out.v;
    out.d = d;
    return out;
}

bool is_active(cplx h_hat, double gamma_th)
{
    detail::require(gamma_th > 0.0, "is_active: truncation threshold must be positive");
    return std::norm(h_hat) >= gamma_th;
}

double pathloss_amplitude(double d, double alpha)
{
    detail::require(d > 0.0, "pathloss_amplitude: distance must be positive");
    detail::require(alpha > 0.0, "pathloss_amplitude: alpha must be positive");
    return std::pow(d, -alpha / 2.0);
}

std::vector<double> draw_distances(std::size_t k_devices, double d_max, RngStream &rng)
{
    detail::require(d_max > 0.0, "draw_distances: d_max must be positive");
    std::vector<double> out(k_devices);
    for (auto &d : out)
        d = d_max * rng.uniform_open_left();
    return out;
}

double max_distance_power(const std::vector<double> &distances, double alpha)
{
    detail::require(!distances.empty(), "max_distance_power: no distances");
    double worst = 0.0;
    for (double d : distances)
    {
        detail::require(d > 0.0, "max_distance_power: distance must be positive");
        worst = std::max(worst, std::pow(d, alpha));
    }
    return worst;
}

} // namespace airfl::channel
