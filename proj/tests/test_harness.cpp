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

#include "airfl/analysis.hpp"
#include "airfl/error.hpp"
#include "airfl/harness.hpp"

#include <cmath>

// Covered tests:
// - Coefficient moments at reference cells and ordering in rho
// - Worker-count independence of chunked Monte Carlo
// - Joint distribution check: bin masses, tail probability, conditional moment
// - Frozen-round divergence vs the exact value, noise scaling, K sweep
// - Table builders

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace airfl;
namespace hs = airfl::harness;

TEST_CASE("Harness - 4-SE rule")
{
    CHECK(hs::within_se(1.0, 1.39, 0.1));
    CHECK_FALSE(hs::within_se(1.0, 1.41, 0.1));
    CHECK(hs::kSigmaRule == 4.0);
}

TEST_CASE("Harness - Coefficient moments")
{
    const auto p = hs::mc_xi_moments(1.0, 0.5, 1000000, 5);
    CHECK(hs::within_se(p.mean, 1.0, p.se_mean));
    CHECK(hs::within_se(p.variance, 0.6487212707001282, p.se_var));

    const auto q = hs::mc_xi_moments(0.8, 0.5, 1000000, 6);
    CHECK(hs::within_se(q.mean, 1.0, q.se_mean));
    CHECK(hs::within_se(q.variance, analysis::xi_variance(0.5, 0.8), q.se_var));

    // closed form strictly decreasing in rho; MC agrees within error bars
    double prev = 1e300;
    for (double rho : {0.5, 0.7, 0.9, 1.0})
    {
        const double exact = analysis::xi_variance(0.5, rho);
        CHECK(exact < prev);
        prev = exact;
        const auto m = hs::mc_xi_moments(rho, 0.5, 200000, 7);
        CHECK(hs::within_se(m.variance, exact, m.se_var));
    }
    CHECK_THROWS_AS(hs::mc_xi_moments(0.8, 0.5, 100, 1), usage_error);
}

TEST_CASE("Harness - Worker count does not change results")
{
    const auto a = hs::mc_xi_moments(0.8, 0.5, 300000, 11, 1);
    const auto b = hs::mc_xi_moments(0.8, 0.5, 300000, 11, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
    CHECK(a.se_var == b.se_var);

    const std::vector<std::vector<double>> grads{{1.0, 0.5}, {-0.3, 0.2}, {0.7, -0.9}};
    const std::vector<double> dist{50.0, 120.0, 300.0};
    aircomp::PowerConfig pc{0.1, 1e-7, 1.2, std::pow(300.0, 2.2)};
    const auto d1 = hs::mc_weight_divergence(grads, dist, 0.8, 2.2, 0.5, pc, 5000, 3, 1);
    const auto d3 = hs::mc_weight_divergence(grads, dist, 0.8, 2.2, 0.5, pc, 5000, 3, 3);
    CHECK(d1.mc == d3.mc);
    CHECK(d1.se == d3.se);
}

TEST_CASE("Harness - Joint distribution check")
{
    // cell masses agree with CDF differences
    for (auto [t0, g0] : {std::pair{-1.0, -2.0}, std::pair{0.5, -0.3}, std::pair{2.0, -3.9}})
    {
        const double t1 = t0 + 0.15, g1 = g0 + 0.0975;
        const double cdf = analysis::joint_cdf_xy(t1, g1) - analysis::joint_cdf_xy(t0, g1) -
                           analysis::joint_cdf_xy(t1, g0) + analysis::joint_cdf_xy(t0, g0);
        CHECK_THAT(hs::pdf_cell_mass(t0, t1, g0, g1), WithinRel(cdf, 1e-7));
    }

    const hs::PdfGrid grid;
    const auto chk = hs::mc_joint_distribution_check(grid, 1.0, 1000000, 13);
    CHECK(chk.bins.rows.size() == 1600);
    CHECK(chk.total_variation < 0.05);
    CHECK(hs::within_se(chk.tail_mc, std::exp(-1.0), chk.tail_se));
    CHECK_THAT(chk.moment_exact, WithinRel(analysis::conditional_second_moment(1.0, 0.0), 1e-15));
    CHECK(hs::within_se(chk.moment_mc, chk.moment_exact, chk.moment_se));
    CHECK_NOTHROW(chk.bins.validate());
    CHECK_THROWS_AS(hs::mc_joint_distribution_check(grid, 1.0, 1000, 13), usage_error);
}

TEST_CASE("Harness - Conditional moment estimator")
{
    const double c = analysis::offset_c(0.5, 0.8);
    const auto m = hs::mc_conditional_second_moment(0.5, c, 400000, 21);
    CHECK(hs::within_se(m.mean, analysis::conditional_second_moment(0.5, c), m.se));
    CHECK(m.n > 0);
}

TEST_CASE("Harness - Frozen-round divergence")
{
    SystemConfig cfg;
    cfg.seed = 2;
    const auto fr = hs::frozen_round(cfg);
    REQUIRE(fr.grads.size() == cfg.k_devices);
    REQUIRE(fr.distances.size() == cfg.k_devices);
    CHECK(fr.gamma_th > 0.0);

    const auto d = hs::mc_weight_divergence(cfg, 20000);
    INFO("mc " << d.mc << " se " << d.se << " exact " << d.exact);
    CHECK(hs::within_se(d.mc, d.exact, d.se));
    CHECK(d.bound > 0.0);
    CHECK(d.bound_violated == (d.exact > d.bound));

    // the noise term is linear in sigma^2
    aircomp::PowerConfig loud = fr.power;
    loud.sigma2 *= 100.0;
    const auto d100 = hs::mc_weight_divergence(fr.grads, fr.distances, cfg.rho, cfg.alpha, fr.gamma_th, loud, 20000, 9);
    CHECK_THAT(d100.noise_exact, WithinRel(100.0 * d.noise_exact, 1e-12));
    CHECK(hs::within_se(d100.mc, d100.exact, d100.se));
    CHECK_THROWS_AS(hs::mc_weight_divergence(cfg, 10), usage_error);
}

TEST_CASE("Harness - K sweep")
{
    const std::vector<std::size_t> ks{1, 2, 4, 8};
    const std::vector<double> y{3.0, 0.75, 0.1875, 0.046875};
    CHECK_THAT(hs::loglog_slope(ks, y), WithinAbs(-2.0, 1e-12));

    SystemConfig cfg;
    cfg.seed = 4;
    const auto ksw = hs::k_scaling(cfg, 5000);
    REQUIRE(ksw.checks.size() == cfg.divergence_k_sweep.size());
    CHECK_THAT(ksw.slope_bound, WithinAbs(-2.0, 1e-9));
    for (std::size_t i = 1; i < ksw.checks.size(); ++i)
        CHECK(ksw.checks[i].exact < ksw.checks[i - 1].exact);
    for (const auto &c : ksw.checks)
        CHECK(hs::within_se(c.mc, c.exact, c.se));
}

TEST_CASE("Harness - Tables")
{
    SystemConfig cfg;
    cfg.verify_rhos = {0.8, 1.0};
    cfg.verify_gammas = {0.5};
    bool pass = false;
    const auto t = hs::xi_table(cfg, 100000, &pass);
    CHECK(t.rows.size() == 2);
    CHECK_NOTHROW(t.validate());

    std::vector<hs::SweepPoint> pts(2);
    pts[0].label = "grid";
    pts[1].label = "joint";
    const auto st = hs::sweep_table(pts);
    CHECK_NOTHROW(st.validate());
    CHECK(st.rows[1].label == "joint");
}
