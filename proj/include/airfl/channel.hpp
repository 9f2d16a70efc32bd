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

#ifndef AIRFL_CHANNEL_HPP
#define AIRFL_CHANNEL_HPP

#include "airfl/rng.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace airfl::channel
{

using cplx = std::complex<double>;

/// Imperfect-CSI model: correlation rho between true and estimated fading,
/// plus the large-scale path-loss exponent.
struct EstimationModel
{
    double rho = 1.0;
    double alpha = 2.2;

    void validate() const;
};

/// One device's channel realization. By construction
/// h == rho * h_hat + sqrt(1 - rho^2) * v, with h_hat and v independent CN(0, 1).
struct ChannelDraw
{
    cplx h;
    cplx h_hat;
    cplx v;
    double d = 1.0;
};

ChannelDraw draw_channel(const EstimationModel &model, double d, RngStream &rng);

// Truncation decision; |h_hat|^2 == gamma_th counts as active.
bool is_active(cplx h_hat, double gamma_th);

double pathloss_amplitude(double d, double alpha);

// Device distances uniform on (0, d_max], drawn once per experiment.
std::vector<double> draw_distances(std::size_t k_devices, double d_max, RngStream &rng);

// max_k d_k^alpha
double max_distance_power(const std::vector<double> &distances, double alpha);

} // namespace airfl::channel

#endif
