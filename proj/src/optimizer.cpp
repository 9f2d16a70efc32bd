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

#include "airfl/optimizer.hpp"
#include "airfl/error.hpp"
#include "airfl/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace airfl::optimizer
{

void ObjectiveCoefficients::validate() const
{
    detail::require(k1 >= 0.0 && std::isfinite(k1), "ObjectiveCoefficients: k1 must be finite and nonnegative");
    detail::require(k2 >= 0.0 && std::isfinite(k2), "ObjectiveCoefficients: k2 must be finite and nonnegative");
    if (k1 == 0.0 && k2 == 0.0)
        throw degenerate_config("ObjectiveCoefficients: k1 = k2 = 0 leaves h monotone with no interior minimum");
}

std::string_view to_string(ThresholdMode mode)
{
    switch (mode)
    {
    case ThresholdMode::joint:
        return "joint";
    case ThresholdMode::communication_oriented:
        return "communication_oriented";
    case ThresholdMode::computation_oriented:
        return "computation_oriented";
    case ThresholdMode::fixed:
        return "fixed";
    }
    return "unknown";
}

ThresholdMode parse_threshold_mode(std::string_view name)
{
    for (auto m : {ThresholdMode::joint, ThresholdMode::communication_oriented, ThresholdMode::computation_oriented,
                   ThresholdMode::fixed})
        if (name == to_string(m))
            return m;
    throw usage_error("unknown threshold mode '" + std::string(name) + "'");
}

ObjectiveCoefficients coefficients_from_system(double rho, const aircomp::PowerConfig &cfg)
{
    detail::require(rho > 0.0 && rho <= 1.0, "coefficients_from_system: rho must lie in (0, 1]");
    cfg.validate();
    if (cfg.sigma2 == 0.0)
        throw degenerate_config("coefficients_from_system: sigma2 = 0 gives k2 = 0");
    ObjectiveCoefficients c;
    c.k1 = (1.0 - rho * rho) / (2.0 * rho * rho);
    c.k2 = cfg.sigma2 * cfg.d_max_alpha / (2.0 * cfg.p_max * rho * rho);
    return c;
}

double objective_h(double x, const ObjectiveCoefficients &coef)
{
    detail::require(x > 0.0, "objective_h: x must be positive");
    const double e2 = std::exp(2.0 * x);
    const double ei = coef.k1 == 0.0 ? 0.0 : coef.k1 * specfun::exp_integral_ei(-x) * e2;
    return std::exp(x) - ei + coef.k2 * e2 / x;
}

double derivative_h(double x, const ObjectiveCoefficients &coef)
{
    detail::require(x > 0.0, "derivative_h: x must be positive");
    const double e1 = std::exp(x);
    const double e2 = std::exp(2.0 * x);
    double out = e1 + coef.k2 * e2 * (2.0 * x - 1.0) / (x * x);
    if (coef.k1 != 0.0)
        out += -coef.k1 * e1 / x - 2.0 * coef.k1 * specfun::exp_integral_ei(-x) * e2;
    return out;
}

// The noise term differentiates to 2 k2 e^{2x} (2x^2 - 2x + 1) / x^3; the
// e^{2x} factor (not e^x) is what makes this agree with finite differences of h'.
double second_derivative_h(double x, const ObjectiveCoefficients &coef)
{
    detail::require(x > 0.0, "second_derivative_h: x must be positive");
    const double e1 = std::exp(x);
    const double e2 = std::exp(2.0 * x);
    double out = e1 + 2.0 * coef.k2 * e2 * (2.0 * x * x - 2.0 * x + 1.0) / (x * x * x);
    if (coef.k1 != 0.0)
        out += coef.k1 * e1 / (x * x) * (-4.0 * x * x * e1 * specfun::exp_integral_ei(-x) - 3.0 * x + 1.0);
    return out;
}

namespace
{
ThresholdSolution bisect_root(const ObjectiveCoefficients &coef, const SolverOptions &opts)
{
    detail::require(opts.derivative_tol > 0.0 && opts.interval_tol > 0.0, "optimal_threshold: tolerances must be positive");
    double lo = opts.lo_seed;
    if (!(derivative_h(lo, coef) < 0.0))
        throw degenerate_config("optimal_threshold: h' is not negative at the lower bracket");
    double hi = 1.0;
    while (!(derivative_h(hi, coef) > 0.0))
    {
        lo = hi;
        hi *= 2.0;
        if (hi > 0x1.0p64)
            throw degenerate_config("optimal_threshold: no sign change of h' found");
    }

    ThresholdSolution sol;
    double mid = 0.5 * (lo + hi);
    double dmid = derivative_h(mid, coef);
    ++sol.iterations;
    while (std::fabs(dmid) > opts.derivative_tol && hi - lo > opts.interval_tol)
    {
        if (!(mid > lo && mid < hi))
            break; // interval exhausted in double precision
        if (dmid < 0.0)
            lo = mid;
        else
            hi = mid;
        mid = 0.5 * (lo + hi);
        dmid = derivative_h(mid, coef);
        ++sol.iterations;
    }
    sol.gamma_star = mid;
    sol.derivative_residual = dmid;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;
    return sol;
}
} // namespace

ThresholdSolution optimal_threshold(const ObjectiveCoefficients &coef, ThresholdMode mode, const SolverOptions &opts)
{
    coef.validate();
    ThresholdSolution sol;
    switch (mode)
    {
    case ThresholdMode::joint:
        sol = bisect_root(coef, opts);
        break;
    case ThresholdMode::communication_oriented:
        // d/dx e^{2x}/x = e^{2x}(2x - 1)/x^2 vanishes at x = 1/2.
        sol.gamma_star = 0.5;
        sol.derivative_residual = 0.0;
        break;
    case ThresholdMode::computation_oriented: {
        if (coef.k1 == 0.0)
            throw degenerate_config("optimal_threshold: with perfect CSI the computation term e^x - 1 has no "
                                    "interior minimum");
        sol = bisect_root(ObjectiveCoefficients{coef.k1, 0.0}, opts);
        break;
    }
    case ThresholdMode::fixed:
        if (!opts.fixed_gamma || !(*opts.fixed_gamma > 0.0))
            throw usage_error("optimal_threshold: fixed mode needs a positive fixed_gamma");
        sol.gamma_star = *opts.fixed_gamma;
        sol.derivative_residual = derivative_h(sol.gamma_star, coef);
        break;
    }
    sol.mode = mode;
    sol.h_value = objective_h(sol.gamma_star, coef);
    return sol;
}

} // namespace airfl::optimizer
