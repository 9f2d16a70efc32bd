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
#include "airfl/fltrain.hpp"
#include "airfl/idx.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

// Covered tests:
// - Logistic and MLP gradients against hand values and finite differences
// - Aggregation and update primitives, evaluation
// - Data generation, partitioning and batch sampling
// - Round mechanics: ideal mode, truncation-only distortion, forced unit coefficients, skipped rounds
// - Training: descent, determinism, measured vs exact divergence
// - IDX reader on raw and gzip input

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace airfl;
using namespace airfl::fltrain;

namespace
{
SystemConfig small_config()
{
    SystemConfig cfg;
    cfg.train.rounds_M = 30;
    cfg.train.samples_per_device = 100;
    cfg.train.test_size = 200;
    cfg.seed = 3;
    return cfg;
}

double fd_check(const Model &m, const ModelParams &w, const Dataset &batch)
{
    const Vec g = local_gradient(m, w, batch);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        ModelParams p = w, q = w;
        const double h = 1e-6 * std::max(1.0, std::fabs(w.w[i]));
        p.w[i] += h;
        q.w[i] -= h;
        const double fd = (batch_loss(m, p, batch) - batch_loss(m, q, batch)) / (2 * h);
        worst = std::max(worst, std::fabs(fd - g[i]) / std::max(1e-3, std::fabs(g[i])));
    }
    return worst;
}
} // namespace

TEST_CASE("FL - Logistic gradient by hand")
{
    LogisticModel m(2);
    const Dataset batch{{{1.0, 2.0}, 1}, {{-1.0, 0.5}, 0}};
    const ModelParams w0{Vec(3, 0.0)};
    // residuals p - y at zero weights are -0.5 and +0.5
    const Vec g = local_gradient(m, w0, batch);
    CHECK_THAT(g[0], WithinAbs(0.5 * (-0.5 * 1.0 + 0.5 * -1.0), 1e-15));
    CHECK_THAT(g[1], WithinAbs(0.5 * (-0.5 * 2.0 + 0.5 * 0.5), 1e-15));
    CHECK_THAT(g[2], WithinAbs(0.0, 1e-15));
    CHECK_THAT(batch_loss(m, w0, batch), WithinRel(std::log(2.0), 1e-15));

    Dataset twice = batch;
    twice.insert(twice.end(), batch.begin(), batch.end());
    const ModelParams w1{{0.3, 0.2, 0.1}};
    const Vec g1 = local_gradient(m, w1, batch), g2 = local_gradient(m, w1, twice);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK_THAT(g2[i], WithinAbs(g1[i], 1e-15));

    // evaluation on the same two samples
    const auto e = evaluate(m, w1, batch);
    const double z0 = 0.3 + 0.4 + 0.1, z1 = -0.3 + 0.1 + 0.1;
    const double l0 = std::log1p(std::exp(-z0)), l1 = std::log1p(std::exp(z1));
    CHECK_THAT(e.loss, WithinRel(0.5 * (l0 + l1), 1e-14));
    CHECK(e.accuracy == 1.0);

    CHECK_THROWS_AS(local_gradient(m, w0, Dataset{}), usage_error);
    CHECK_THROWS_AS(evaluate(m, w0, Dataset{}), usage_error);
}

TEST_CASE("FL - Gradients match finite differences")
{
    RngStream rng(21, 0);
    LogisticModel lm(9);
    MlpModel mm(9, 16, 3);
    const Dataset pool2 = make_blobs(400, 9, 2, 2.0, rng);
    const Dataset pool3 = make_blobs(400, 9, 3, 2.0, rng);
    for (int trial = 0; trial < 20; ++trial)
    {
        ModelParams wl{Vec(lm.dim())};
        for (auto &x : wl.w)
            x = 0.5 * rng.normal();
        CHECK(fd_check(lm, wl, sample_batch(pool2, 16, rng)) < 1e-5);

        ModelParams wm = mm.init(rng);
        CHECK(fd_check(mm, wm, sample_batch(pool3, 16, rng)) < 1e-5);
    }
}

TEST_CASE("FL - Aggregation and update")
{
    const std::vector<Vec> one{{1.0, -2.0}};
    CHECK(ideal_aggregate(one) == one[0]);
    const std::vector<Vec> opposite{{1.0, -2.0}, {-1.0, 2.0}};
    CHECK(ideal_aggregate(opposite) == Vec{0.0, 0.0});
    const std::vector<Vec> three{{1.0, 2.0, 3.0}, {0.5, -1.0, 4.0}, {2.0, 0.0, -1.0}};
    const Vec mean = ideal_aggregate(three);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK_THAT(mean[j], WithinAbs((three[0][j] + three[1][j] + three[2][j]) / 3.0, 1e-15));
    const std::vector<Vec> bad{{1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(ideal_aggregate(bad), usage_error);

    const ModelParams w{{1.0, -1.0, 0.5}};
    CHECK(global_update(w, Vec(3, 0.0), 0.1).w == w.w);
    const auto z = global_update(w, w.w, 1.0);
    CHECK(z.w == Vec(3, 0.0));
    const Vec g{0.2, 0.4, -0.6};
    const auto u = global_update(w, g, 0.5);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(u.w[j] == w.w[j] - 0.5 * g[j]);
    CHECK_THROWS_AS(global_update(w, Vec(2, 0.0), 0.1), usage_error);
}

TEST_CASE("FL - Data and evaluation")
{
    RngStream rng(4, 0);
    const Dataset data = make_blobs(1000, 9, 2, 2.0, rng);
    std::size_t ones = 0;
    for (const auto &s : data)
        ones += s.label == 1;
    CHECK(ones == 500);

    LogisticModel m(9);
    CHECK(evaluate(m, {Vec(10, 0.0)}, data).accuracy == 0.5);

    // separable toy set with a perfect classifier
    const Dataset toy{{{2.0, 0.0}, 1}, {{-2.0, 0.0}, 0}, {{1.0, 5.0}, 1}, {{-0.5, -3.0}, 0}};
    LogisticModel m2(2);
    CHECK(evaluate(m2, {{1.0, 0.0, 0.0}}, toy).accuracy == 1.0);

    const auto shards = partition(data, 10, 100, Partition::iid, rng);
    REQUIRE(shards.size() == 10);
    for (const auto &s : shards)
        CHECK(s.size() == 100);
    const auto skew = partition(data, 10, 50, Partition::label_skew, rng);
    for (const auto &s : skew)
    {
        std::set<int> labels;
        for (const auto &x : s)
            labels.insert(x.label);
        CHECK(labels.size() <= 2);
    }
    CHECK_THROWS_AS(partition(data, 10, 101, Partition::iid, rng), usage_error);

    RngStream a(8, 1), b(8, 1);
    const auto b1 = sample_batch(data, 32, a);
    const auto b2 = sample_batch(data, 32, b);
    REQUIRE(b1.size() == 32);
    for (std::size_t i = 0; i < 32; ++i)
    {
        CHECK(b1[i].x == b2[i].x);
        CHECK(b1[i].label == b2[i].label);
    }
    // without replacement: distinct feature vectors
    std::set<Vec> distinct;
    for (const auto &s : b1)
        distinct.insert(s.x);
    CHECK(distinct.size() == 32);
}

TEST_CASE("FL - Round mechanics")
{
    SystemConfig cfg = small_config();
    cfg.resolve();
    const Federation fed = build_federation(cfg);
    RngStream init_rng(cfg.seed, stream_id(StreamTag::init));
    ModelParams w = fed.model->init(init_rng);

    RoundContext ctx;
    ctx.federation = &fed;
    ctx.mode = AggregationMode::ideal;
    ctx.power = power_config(cfg, fed, 5.0);
    ctx.seed = cfg.seed;
    const auto ideal = run_round(w, ctx, 0);
    CHECK(ideal.record.divergence == 0.0);
    CHECK(ideal.record.active == cfg.k_devices);

    // truncation-only distortion with perfect CSI and no noise
    ctx.mode = AggregationMode::aircomp;
    ctx.rho = 1.0;
    ctx.power.sigma2 = 0.0;
    ctx.gamma_th = 1e-3;
    int all_active = 0;
    for (std::size_t r = 0; r < 20; ++r)
    {
        const auto res = run_round(w, ctx, r);
        if (res.record.active != cfg.k_devices)
            continue;
        ++all_active;
        const Vec g = ideal_aggregate(round_gradients(fed, w, ctx.batch_size, ctx.seed, r));
        const double expect = std::expm1(ctx.gamma_th) * std::expm1(ctx.gamma_th) * aircomp::squared_norm(g);
        CHECK_THAT(res.record.divergence, WithinRel(expect, 1e-9));
    }
    CHECK(all_active > 0);

    // a threshold no device can reach skips the round
    ctx.gamma_th = 60.0;
    const auto skipped = run_round(w, ctx, 0);
    CHECK(skipped.record.skipped);
    CHECK(skipped.next.w == w.w);

    // unit coefficients without noise reproduce the ideal trajectory bit for bit
    RoundContext ideal_ctx = ctx;
    ideal_ctx.mode = AggregationMode::ideal;
    ctx.gamma_th = 0.5;
    ctx.aggregate_opts.force_unit_xi = true;
    ModelParams wa = w, wb = w;
    for (std::size_t r = 0; r < 25; ++r)
    {
        const auto ra = run_round(wa, ctx, r);
        const auto rb = run_round(wb, ideal_ctx, r);
        CHECK(ra.next.w == rb.next.w);
        CHECK(ra.record.loss == rb.record.loss);
        CHECK(ra.record.accuracy == rb.record.accuracy);
        CHECK(ra.record.divergence == 0.0);
        wa = ra.next;
        wb = rb.next;
    }
}

TEST_CASE("FL - Training")
{
    SystemConfig cfg = small_config();
    cfg.mode = AggregationMode::ideal;
    const auto t1 = train(cfg);
    REQUIRE(t1.records.size() == cfg.train.rounds_M);
    CHECK(t1.records.back().loss < t1.initial_loss);

    const auto t2 = train(cfg);
    CHECK(t1.final_params.w == t2.final_params.w);
    for (std::size_t m = 0; m < t1.records.size(); ++m)
        CHECK(t1.records[m].loss == t2.records[m].loss);

    // measured divergence over rounds vs the closed form for each round's gradients
    cfg.mode = AggregationMode::aircomp;
    cfg.train.rounds_M = 400;
    const auto t3 = train(cfg);
    double s = 0, s2 = 0, ex = 0;
    for (const auto &r : t3.records)
    {
        CHECK(std::isfinite(r.divergence));
        CHECK(r.divergence >= 0.0);
        // normalise by the closed form so rounds are exchangeable
        const double q = r.divergence / r.expected_divergence;
        s += q;
        s2 += q * q;
        ex += 1.0;
    }
    const double mean = s / ex;
    const double se = std::sqrt((s2 / ex - mean * mean) / ex);
    INFO("mean ratio " << mean << " se " << se);
    CHECK(std::fabs(mean - 1.0) <= 4.0 * se);
}

TEST_CASE("FL - MLP task trains")
{
    SystemConfig cfg = small_config();
    cfg.train.task = Task::small_mlp;
    cfg.train.n_classes = 3;
    cfg.train.eta = 0.1;
    cfg.mode = AggregationMode::ideal;
    const auto t = train(cfg);
    CHECK(t.records.back().loss < t.initial_loss);
}

TEST_CASE("FL - IDX reader")
{
    std::vector<std::uint8_t> img{0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 3};
    for (int i = 0; i < 12; ++i)
        img.push_back(static_cast<std::uint8_t>(i * 20));
    std::vector<std::uint8_t> lab{0, 0, 8, 1, 0, 0, 0, 2, 7, 3};

    const auto parsed = idx::parse_images(img);
    CHECK(parsed.rows == 2);
    CHECK(parsed.cols == 3);
    REQUIRE(parsed.pixels.size() == 2);
    CHECK(parsed.pixels[1][0] == 120);
    CHECK(idx::parse_labels(lab) == std::vector<std::uint8_t>{7, 3});
    CHECK_THROWS(idx::parse_labels(img));
    std::vector<std::uint8_t> truncated(img.begin(), img.end() - 1);
    CHECK_THROWS(idx::parse_images(truncated));

    const auto dir = std::filesystem::temp_directory_path() / "airfl_idx_test";
    std::filesystem::create_directories(dir);
    const auto raw = (dir / "labels.idx").string();
    {
        std::ofstream f(raw, std::ios::binary);
        f.write(reinterpret_cast<const char *>(lab.data()), static_cast<std::streamsize>(lab.size()));
    }
    CHECK(idx::read_labels(raw) == std::vector<std::uint8_t>{7, 3});
    const auto gz = (dir / "images.idx.gz").string();
    {
        gzFile f = gzopen(gz.c_str(), "wb");
        REQUIRE(f != nullptr);
        gzwrite(f, img.data(), static_cast<unsigned>(img.size()));
        gzclose(f);
    }
    CHECK(idx::read_images(gz).pixels == parsed.pixels);
    CHECK_THROWS(idx::read_images((dir / "missing").string()));
    std::filesystem::remove_all(dir);
}
