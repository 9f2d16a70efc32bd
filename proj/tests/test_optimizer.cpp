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

#include <catch_amalgamated.hpp>

#include "airfl/error.hpp"
#include "airfl/optimizer.hpp"

#include <cmath>
#include <vector>

// Covered tests:
// - Coefficients from the physical configuration
// - Objective values, first and second derivatives against finite differences
// - Convexity on a coefficient grid and single sign change of h'
// - Bisection accuracy, grid optimality, iteration count and baseline modes

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace airfl;
namespace op = airfl::optimizer;

static std::vector<double> logspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return v;
}

static std::vector<op::ObjectiveCoefficients> coefficient_grid()
{
    std::vector<op::ObjectiveCoefficients> out;
    for (double k1 : {0.0, 0.05, 0.28125, 1.5, 10.0})
        for (double k2 : {1e-3, 0.1, 0.4312, 2.0, 50.0})
            out.push_back({k1, k2});
    return out;
}

TEST_CASE("Optimizer - Coefficients from system")
{
    aircomp::PowerConfig cfg{0.1, 1e-7, 1.0, std::pow(500.0, 2.2)};
    const auto c1 = op::coefficients_from_system(1.0, cfg);
    CHECK(c1.k1 == 0.0);
    CHECK_THAT(c1.k2, WithinRel(0.43322, 1e-4));
    CHECK_THAT(c1.k2, WithinRel(1e-7 * std::pow(500.0, 2.2) / 0.2, 1e-14));
    CHECK_THAT(op::coefficients_from_system(0.8, cfg).k1, WithinRel(0.28125, 1e-15));
    cfg.sigma2 = 0.0;
    CHECK_THROWS_AS(op::coefficients_from_system(0.8, cfg), degenerate_config);
    CHECK_THROWS_AS((op::ObjectiveCoefficients{0.0, 0.0}.validate()), degenerate_config);
    CHECK_THROWS_AS((op::ObjectiveCoefficients{-1.0, 1.0}.validate()), domain_error);
}

TEST_CASE("Optimizer - Objective and derivatives")
{
    const op::ObjectiveCoefficients c{0.0, 1.0};
    CHECK_THAT(op::objective_h(0.5, c), WithinRel(7.0852847, 1e-7));
    CHECK_THAT(op::objective_h(0.5, c), WithinRel(std::exp(0.5) + std::exp(1.0) / 0.5, 1e-15));
    CHECK(op::objective_h(1e-6, c) > 1e5);
    CHECK(op::objective_h(10.0, c) > op::objective_h(2.0, c));
    CHECK_THAT(op::derivative_h(0.5, c), WithinRel(std::exp(0.5), 1e-15));
    CHECK_THROWS_AS(op::objective_h(0.0, c), domain_error);
    CHECK_THROWS_AS(op::derivative_h(-1.0, c), domain_error);
    CHECK_THROWS_AS(op::second_derivative_h(0.0, c), domain_error);

    aircomp::PowerConfig cfg{0.1, 1e-7, 1.0, std::pow(500.0, 2.2)};
    const auto def = op::coefficients_from_system(0.8, cfg);
    CHECK(op::derivative_h(1e-6, def) < 0.0);
    CHECK(op::derivative_h(20.0, def) > 0.0);

    // k2 -> 0 limit of h'' is e^x
    for (double x : {0.1, 1.0, 3.0})
        CHECK_THAT(op::second_derivative_h(x, {0.0, 1e-300}), WithinRel(std::exp(x), 1e-14));

    for (const auto &co : coefficient_grid())
    {
        for (double x : {0.2, 0.3, 0.7, 1.0, 1.5, 2.0, 3.0})
        {
            const double h = 1e-5 * x;
            const double fd1 = (op::objective_h(x + h, co) - op::objective_h(x - h, co)) / (2 * h);
            const double fd2 = (op::derivative_h(x + h, co) - op::derivative_h(x - h, co)) / (2 * h);
            INFO("k1 " << co.k1 << " k2 " << co.k2 << " x " << x);
            CHECK_THAT(op::derivative_h(x, co), WithinAbs(fd1, 1e-6 * std::max(1.0, std::fabs(fd1))));
            CHECK_THAT(op::second_derivative_h(x, co), WithinRel(fd2, 1e-5));
        }
    }
}

TEST_CASE("Optimizer - Convexity and single sign change")
{
    for (const auto &co : coefficient_grid())
    {
        for (double x : logspace(1e-3, 10.0, 200))
        {
            INFO("k1 " << co.k1 << " k2 " << co.k2 << " x " << x);
            CHECK(op::second_derivative_h(x, co) > 0.0);
        }
        int changes = 0;
        double prev = op::derivative_h(1e-8, co);
        for (double x : logspace(1e-8, 64.0, 10000))
        {
            const double d = op::derivative_h(x, co);
            if ((d > 0.0) != (prev > 0.0))
                ++changes;
            prev = d;
        }
        CHECK(changes == 1);
    }
}

TEST_CASE("Optimizer - Joint threshold")
{
    const auto sol = op::optimal_threshold({0.0, 1.0}, op::ThresholdMode::joint);
    CHECK_THAT(sol.gamma_star, WithinAbs(0.438, 1e-3));
    // independent oracle: root of 1 + e^x (2x - 1) / x^2 by plain bisection
    double lo = 0.1, hi = 0.5;
    for (int i = 0; i < 200; ++i)
    {
        const double m = 0.5 * (lo + hi);
        (1.0 + std::exp(m) * (2 * m - 1) / (m * m) < 0.0 ? lo : hi) = m;
    }
    CHECK_THAT(sol.gamma_star, WithinAbs(lo, 1e-9));

    op::SolverOptions opts;
    for (const auto &co : coefficient_grid())
    {
        const auto s = op::optimal_threshold(co, op::ThresholdMode::joint, opts);
        INFO("k1 " << co.k1 << " k2 " << co.k2 << " gamma* " << s.gamma_star);
        CHECK(std::fabs(s.derivative_residual) < 1e-10);
        CHECK(std::fabs(op::derivative_h(s.gamma_star, co)) < 1e-10);
        double grid_min = 1e300;
        for (double x : logspace(1e-3, 10.0, 10000))
            grid_min = std::min(grid_min, op::objective_h(x, co));
        CHECK(s.h_value <= grid_min + 1e-9);
        CHECK(s.bracket_lo <= s.gamma_star);
        CHECK(s.gamma_star <= s.bracket_hi);

        // initial bracket as the solver builds it
        double b_lo = opts.lo_seed, b_hi = 1.0;
        while (!(op::derivative_h(b_hi, co) > 0.0))
        {
            b_lo = b_hi;
            b_hi *= 2.0;
        }
        const double limit = std::ceil(std::log2((b_hi - b_lo) / opts.interval_tol)) + 2.0;
        CHECK(static_cast<double>(s.iterations) <= limit);
    }
}

TEST_CASE("Optimizer - Baseline modes")
{
    for (const auto &co : coefficient_grid())
    {
        const auto s = op::optimal_threshold(co, op::ThresholdMode::communication_oriented);
        CHECK(s.gamma_star == 0.5);
        CHECK(s.mode == op::ThresholdMode::communication_oriented);
    }
    const op::ObjectiveCoefficients co{0.28125, 0.43};
    const auto comp = op::optimal_threshold(co, op::ThresholdMode::computation_oriented);
    CHECK(std::fabs(op::derivative_h(comp.gamma_star, {co.k1, 0.0})) < 1e-10);
    CHECK_THROWS_AS(op::optimal_threshold({0.0, 1.0}, op::ThresholdMode::computation_oriented), degenerate_config);

    op::SolverOptions opts;
    CHECK_THROWS_AS(op::optimal_threshold(co, op::ThresholdMode::fixed, opts), usage_error);
    opts.fixed_gamma = 1.25;
    const auto fx = op::optimal_threshold(co, op::ThresholdMode::fixed, opts);
    CHECK(fx.gamma_star == 1.25);
    CHECK(fx.h_value == op::objective_h(1.25, co));

    for (auto m : {op::ThresholdMode::joint, op::ThresholdMode::communication_oriented,
                   op::ThresholdMode::computation_oriented, op::ThresholdMode::fixed})
        CHECK(op::parse_threshold_mode(op::to_string(m)) == m);
    CHECK_THROWS_AS(op::parse_threshold_mode("best"), usage_error);
}

TEST_CASE("Optimizer - Better CSI prefers a lower threshold")
{
    aircomp::PowerConfig cfg{0.1, 1e-7, 1.0, std::pow(500.0, 2.2)};
    const double g50 = op::optimal_threshold(op::coefficients_from_system(0.5, cfg), op::ThresholdMode::joint).gamma_star;
    const double g95 = op::optimal_threshold(op::coefficients_from_system(0.95, cfg), op::ThresholdMode::joint).gamma_star;
    INFO("gamma*(0.5) = " << g50 << ", gamma*(0.95) = " << g95);
    CHECK(g95 < g50);
}
