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

#ifndef AIRFL_OPTIMIZER_HPP
#define AIRFL_OPTIMIZER_HPP

#include "airfl/aircomp.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace airfl::optimizer
{

// h(x) = e^x - k1 Ei(-x) e^{2x} + k2 e^{2x} / x
struct ObjectiveCoefficients
{
    double k1 = 0.0; // (1 - rho^2) / (2 rho^2)
    double k2 = 1.0; // sigma2 max_k d_k^alpha / (2 P_max rho^2)

    void validate() const;
};

enum class ThresholdMode
{
    joint,
    communication_oriented,
    computation_oriented,
    fixed,
};

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view name);

struct ThresholdSolution
{
    double gamma_star = 0.0;
    double h_value = 0.0;
    double derivative_residual = 0.0;
    std::size_t iterations = 0;
    ThresholdMode mode = ThresholdMode::joint;
    // Final bracket, for convergence diagnostics.
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

struct SolverOptions
{
    double derivative_tol = 1e-10;
    double interval_tol = 1e-14;
    double lo_seed = 1e-8;
    // Only read in fixed mode.
    std::optional<double> fixed_gamma;
};

ObjectiveCoefficients coefficients_from_system(double rho, const aircomp::PowerConfig &cfg);

double objective_h(double x, const ObjectiveCoefficients &coef);
double derivative_h(double x, const ObjectiveCoefficients &coef);
double second_derivative_h(double x, const ObjectiveCoefficients &coef);

ThresholdSolution optimal_threshold(const ObjectiveCoefficients &coef, ThresholdMode mode,
                                    const SolverOptions &opts = {});

} // namespace airfl::optimizer

#endif
