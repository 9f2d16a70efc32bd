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

#include "airfl/aircomp.hpp"
#include "airfl/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

// Covered tests:
// - Compensation constant, scaling factor and dBm conversion
// - Effective coefficient branches and receiver-model consistency of beta
// - Instantaneous transmit power budget
// - Aggregation: noise-free composition, skipped rounds, unbiasedness, noise energy
// - Reconstruction of g_hat from the stored outcome fields

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace airfl;
using aircomp::Vec;

TEST_CASE("AirComp - Constants")
{
    CHECK_THAT(aircomp::compensation_lambda(1e-12, 1.0), WithinRel(1.0, 1e-11));
    CHECK_THAT(aircomp::compensation_lambda(0.5, 0.8), WithinRel(2.0609015883751, 1e-12));
    CHECK_THAT(aircomp::compensation_lambda(1.0, 1.0), WithinRel(std::exp(1.0), 1e-15));
    CHECK_THROWS_AS(aircomp::compensation_lambda(0.0, 0.8), domain_error);
    CHECK_THROWS_AS(aircomp::compensation_lambda(0.5, 0.0), domain_error);
    CHECK_THROWS_AS(aircomp::compensation_lambda(0.5, 1.5), domain_error);

    aircomp::PowerConfig cfg{0.1, 1e-7, 1.0, 1.0};
    const double z = aircomp::scaling_zeta(10, 1.0, cfg, 1.0);
    CHECK_THAT(z, WithinRel(10.0 * std::sqrt(0.1) / std::exp(1.0), 1e-14));
    CHECK_THAT(z, WithinRel(1.1633369, 1e-7));
    CHECK_THAT(aircomp::scaling_zeta(20, 1.0, cfg, 1.0), WithinRel(2.0 * z, 1e-15));
    CHECK_THAT(aircomp::scaling_zeta(10, 0.5, cfg, 1.0), WithinRel(0.5 * z, 1e-15));

    CHECK_THAT(aircomp::dbm_to_watts(-40.0), WithinRel(1e-7, 1e-14));
    CHECK_THAT(aircomp::dbm_to_watts(30.0), WithinRel(1.0, 1e-15));

    cfg.sigma2 = -1.0;
    CHECK_THROWS_AS(cfg.validate(), domain_error);
}

TEST_CASE("AirComp - Effective coefficient")
{
    const double lam = std::exp(0.5);
    channel::ChannelDraw d{{0.9, -0.7}, {0.9, -0.7}, {0.0, 0.0}, 1.0};
    CHECK_THAT(aircomp::effective_xi(d, 0.5, lam), WithinRel(1.6487212707001282, 1e-15));
    d.h_hat = d.h = {0.3, 0.2};
    CHECK(aircomp::effective_xi(d, 0.5, lam) == 0.0);
    CHECK_THROWS_AS(aircomp::effective_xi(d, 0.5, 0.0), domain_error);
}

TEST_CASE("AirComp - Pre-processing factor")
{
    channel::ChannelDraw real_draw{{2.0, 0.0}, {2.0, 0.0}, {0.0, 0.0}, 1.0};
    const auto b = aircomp::preprocessing_beta(real_draw, 3.0, 1.5, 5, 2.2);
    CHECK(b.imag() == 0.0);
    CHECK_THAT(b.real(), WithinRel(3.0 * 1.5 / (5.0 * 2.0), 1e-15));
    real_draw.h_hat = 0.0;
    CHECK_THROWS_AS(aircomp::preprocessing_beta(real_draw, 3.0, 1.5, 5, 2.2), domain_error);

    const channel::EstimationModel m{0.7, 2.2};
    const std::size_t K = 10;
    const double gamma = 0.4;
    aircomp::PowerConfig cfg{0.1, 1e-7, 2.0, std::pow(500.0, 2.2)};
    const double lam = aircomp::compensation_lambda(gamma, m.rho);
    const double zeta = aircomp::scaling_zeta(K, m.rho, cfg, gamma);
    RngStream rng(11, 0);

    // receiver model Re{d^{-a/2} h beta} / (zeta / K) reproduces xi
    int checked = 0;
    while (checked < 1000)
    {
        const double dist = 500.0 * rng.uniform_open_left();
        const auto d = channel::draw_channel(m, dist, rng);
        if (!channel::is_active(d.h_hat, gamma))
            continue;
        const auto beta = aircomp::preprocessing_beta(d, zeta, lam, K, m.alpha);
        const double rx = std::real(channel::pathloss_amplitude(dist, m.alpha) * d.h * beta) / (zeta / K);
        const double xi = aircomp::effective_xi(d, gamma, lam);
        CHECK_THAT(rx, WithinAbs(xi, 1e-12 * std::max(1.0, std::fabs(xi))));
        ++checked;
    }

    // power budget: |beta|^2 ||g||^2 <= P_max for ||g|| <= G
    int active = 0;
    double worst = 0.0;
    while (active < 100000)
    {
        const double dist = 500.0 * rng.uniform_open_left();
        const auto d = channel::draw_channel(m, dist, rng);
        if (!channel::is_active(d.h_hat, gamma))
            continue;
        ++active;
        const double gnorm = cfg.g_bound * rng.uniform();
        const double power = std::norm(aircomp::preprocessing_beta(d, zeta, lam, K, m.alpha)) * gnorm * gnorm;
        worst = std::max(worst, power / cfg.p_max);
    }
    INFO("largest power fraction " << worst);
    CHECK(worst <= 1.0);
}

TEST_CASE("AirComp - Noise-free composition and skipped rounds")
{
    const std::vector<Vec> grads{{1.0, 2.0}, {-3.0, 0.5}, {0.25, 4.0}};
    std::vector<channel::ChannelDraw> draws{
        {{1.0, 0.0}, {1.0, 0.0}, {}, 1.0}, {{0.1, 0.0}, {0.1, 0.0}, {}, 1.0}, {{0.0, 2.0}, {0.0, 2.0}, {}, 1.0}};
    aircomp::PowerConfig cfg{0.1, 0.0, 5.0, 1.0};
    RngStream rng(3, 0);
    const double gamma = 0.5;
    const auto out = aircomp::aggregate(grads, draws, gamma, 1.0, cfg, rng);
    REQUIRE(out.active_set == std::vector<std::size_t>{0, 2});
    CHECK(out.xi[1] == 0.0);
    CHECK_THAT(out.xi[0], WithinRel(std::exp(gamma), 1e-15));
    CHECK_THAT(out.xi[2], WithinRel(std::exp(gamma), 1e-15));
    for (std::size_t j = 0; j < 2; ++j)
        CHECK_THAT(out.g_hat[j], WithinAbs(std::exp(gamma) * (grads[0][j] + grads[2][j]) / 3.0, 1e-14));
    CHECK_FALSE(out.skipped);

    // K = 1 with a truncated device
    const std::vector<Vec> one{{1.0, 1.0}};
    const std::vector<channel::ChannelDraw> weak{{{0.1, 0.0}, {0.1, 0.0}, {}, 1.0}};
    const auto sk = aircomp::aggregate(one, weak, gamma, 1.0, cfg, rng);
    CHECK(sk.skipped);
    CHECK(sk.active_set.empty());
    CHECK(sk.g_hat == Vec{0.0, 0.0});

    // usage errors
    const std::vector<Vec> bad{{1.0}, {1.0, 2.0}};
    const std::vector<channel::ChannelDraw> two(2, draws[0]);
    CHECK_THROWS_AS(aircomp::aggregate(bad, two, gamma, 1.0, cfg, rng), usage_error);
    CHECK_THROWS_AS(aircomp::aggregate(grads, two, gamma, 1.0, cfg, rng), usage_error);
}

TEST_CASE("AirComp - Unbiasedness and noise energy")
{
    const std::size_t K = 4, trials = 10000;
    const std::vector<Vec> grads{{1.0, -2.0, 0.5}, {0.3, 0.7, -1.1}, {2.0, 0.0, 0.4}, {-0.6, 1.5, 0.9}};
    Vec ideal(3, 0.0);
    for (const auto &g : grads)
        for (std::size_t j = 0; j < 3; ++j)
            ideal[j] += g[j] / K;
    const channel::EstimationModel m{0.8, 2.2};
    aircomp::PowerConfig cfg{0.1, 1e-7, 3.0, std::pow(300.0, 2.2)};
    const double gamma = 0.5;

    Vec s(3, 0.0), s2(3, 0.0);
    double noise = 0.0, noise2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t)
    {
        RngStream rng(77, stream_id(StreamTag::trial, t));
        std::vector<channel::ChannelDraw> draws;
        for (std::size_t k = 0; k < K; ++k)
            draws.push_back(channel::draw_channel(m, 100.0 + 50.0 * k, rng));
        const auto out = aircomp::aggregate(grads, draws, gamma, m.rho, cfg, rng);
        for (std::size_t j = 0; j < 3; ++j)
        {
            // stored fields reconstruct the estimate
            double rec = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                rec += out.xi[k] * grads[k][j];
            rec = rec / K + out.noise_realization[j];
            CHECK_THAT(out.estimate[j], WithinAbs(rec, 1e-12));
            s[j] += out.estimate[j];
            s2[j] += out.estimate[j] * out.estimate[j];
        }
        for (std::size_t k = 0; k < K; ++k)
        {
            const bool in_set = std::find(out.active_set.begin(), out.active_set.end(), k) != out.active_set.end();
            CHECK((out.xi[k] != 0.0) == in_set);
        }
        const double e = aircomp::squared_norm(out.noise_realization);
        noise += e;
        noise2 += e * e;
    }
    const double n = static_cast<double>(trials);
    for (std::size_t j = 0; j < 3; ++j)
    {
        const double mean = s[j] / n;
        const double se = std::sqrt((s2[j] / n - mean * mean) / n);
        INFO("component " << j << " mean " << mean << " ideal " << ideal[j] << " se " << se);
        CHECK(std::fabs(mean - ideal[j]) <= 4.0 * se);
    }
    const double zeta = aircomp::scaling_zeta(K, m.rho, cfg, gamma);
    const double expected = 3.0 * cfg.sigma2 / (2.0 * zeta * zeta);
    const double nm = noise / n;
    const double nse = std::sqrt((noise2 / n - nm * nm) / n);
    INFO("noise energy " << nm << " expected " << expected << " se " << nse);
    CHECK(std::fabs(nm - expected) <= 4.0 * nse);
}
