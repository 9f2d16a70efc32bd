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

#include "airfl/fltrain.hpp"
#include "airfl/analysis.hpp"
#include "airfl/channel.hpp"
#include "airfl/error.hpp"
#include "airfl/idx.hpp"
#include "airfl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace airfl::fltrain
{

// ---- logistic regression ---------------------------------------------------

LogisticModel::LogisticModel(std::size_t n_features) : n_features_(n_features)
{
    detail::require(n_features >= 1, "LogisticModel: need at least one feature");
}

ModelParams LogisticModel::init(RngStream &) const
{
    return {Vec(dim(), 0.0)};
}

double LogisticModel::logit(const Vec &w, const Vec &x) const
{
    double z = w[n_features_];
    for (std::size_t i = 0; i < n_features_; ++i)
        z += w[i] * x[i];
    return z;
}

double LogisticModel::sample_loss(const Vec &w, const Sample &s) const
{
    const double z = logit(w, s.x);
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - (s.label == 1 ? z : 0.0);
}

void LogisticModel::accumulate_gradient(const Vec &w, const Sample &s, Vec &grad) const
{
    const double z = logit(w, s.x);
    const double p = 1.0 / (1.0 + std::exp(-z));
    const double r = p - (s.label == 1 ? 1.0 : 0.0);
    for (std::size_t i = 0; i < n_features_; ++i)
        grad[i] += r * s.x[i];
    grad[n_features_] += r;
}

int LogisticModel::predict(const Vec &w, const Vec &x) const
{
    return logit(w, x) > 0.0 ? 1 : 0;
}

// ---- one-hidden-layer MLP --------------------------------------------------

MlpModel::MlpModel(std::size_t n_inputs, std::size_t hidden, std::size_t n_classes)
    : in_(n_inputs), hid_(hidden), out_(n_classes)
{
    detail::require(in_ >= 1 && hid_ >= 1 && out_ >= 2, "MlpModel: bad layer sizes");
}

std::size_t MlpModel::dim() const
{
    return hid_ * in_ + hid_ + out_ * hid_ + out_;
}

ModelParams MlpModel::init(RngStream &rng) const
{
    Vec w(dim(), 0.0);
    const double s1 = std::sqrt(2.0 / static_cast<double>(in_));
    const double s2 = std::sqrt(1.0 / static_cast<double>(hid_));
    for (std::size_t i = 0; i < hid_ * in_; ++i)
        w[i] = s1 * rng.normal();
    const std::size_t w2 = hid_ * in_ + hid_;
    for (std::size_t i = 0; i < out_ * hid_; ++i)
        w[w2 + i] = s2 * rng.normal();
    return {std::move(w)};
}

void MlpModel::forward(const Vec &w, const Vec &x, Vec &hidden, Vec &logits) const
{
    const double *W1 = w.data();
    const double *b1 = W1 + hid_ * in_;
    const double *W2 = b1 + hid_;
    const double *b2 = W2 + out_ * hid_;
    hidden.assign(hid_, 0.0);
    for (std::size_t j = 0; j < hid_; ++j)
    {
        double a = b1[j];
        for (std::size_t i = 0; i < in_; ++i)
            a += W1[j * in_ + i] * x[i];
        hidden[j] = a; // pre-activation; ReLU applied by callers through max(0, .)
    }
    logits.assign(out_, 0.0);
    for (std::size_t c = 0; c < out_; ++c)
    {
        double a = b2[c];
        for (std::size_t j = 0; j < hid_; ++j)
            a += W2[c * hid_ + j] * std::max(0.0, hidden[j]);
        logits[c] = a;
    }
}

namespace
{
double log_sum_exp(const Vec &v)
{
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - m);
    return m + std::log(s);
}
} // namespace

double MlpModel::sample_loss(const Vec &w, const Sample &s) const
{
    Vec hidden, logits;
    forward(w, s.x, hidden, logits);
    return log_sum_exp(logits) - logits[static_cast<std::size_t>(s.label)];
}

void MlpModel::accumulate_gradient(const Vec &w, const Sample &s, Vec &grad) const
{
    Vec pre, logits;
    forward(w, s.x, pre, logits);
    const double lse = log_sum_exp(logits);
    Vec dlogits(out_);
    for (std::size_t c = 0; c < out_; ++c)
        dlogits[c] = std::exp(logits[c] - lse) - (static_cast<int>(c) == s.label ? 1.0 : 0.0);

    const double *W2 = w.data() + hid_ * in_ + hid_;
    double *gW1 = grad.data();
    double *gb1 = gW1 + hid_ * in_;
    double *gW2 = gb1 + hid_;
    double *gb2 = gW2 + out_ * hid_;
    for (std::size_t c = 0; c < out_; ++c)
    {
        gb2[c] += dlogits[c];
        for (std::size_t j = 0; j < hid_; ++j)
            gW2[c * hid_ + j] += dlogits[c] * std::max(0.0, pre[j]);
    }
    for (std::size_t j = 0; j < hid_; ++j)
    {
        if (!(pre[j] > 0.0))
            continue;
        double dh = 0.0;
        for (std::size_t c = 0; c < out_; ++c)
            dh += W2[c * hid_ + j] * dlogits[c];
        gb1[j] += dh;
        for (std::size_t i = 0; i < in_; ++i)
            gW1[j * in_ + i] += dh * s.x[i];
    }
}

int MlpModel::predict(const Vec &w, const Vec &x) const
{
    Vec hidden, logits;
    forward(w, x, hidden, logits);
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

std::unique_ptr<Model> make_model(const TrainConfig &tc, std::size_t n_inputs)
{
    switch (tc.task)
    {
    case Task::synthetic_logistic:
        return std::make_unique<LogisticModel>(n_inputs);
    case Task::small_mlp:
    case Task::mnist_mlp:
        return std::make_unique<MlpModel>(n_inputs, tc.hidden, tc.n_classes);
    }
    throw usage_error("make_model: unknown task");
}

// ---- data ------------------------------------------------------------------

Dataset make_blobs(std::size_t n, std::size_t n_features, std::size_t n_classes, double separation, RngStream &rng)
{
    detail::require(n_features >= 1 && n_classes >= 2, "make_blobs: need >= 1 feature and >= 2 classes");
    std::vector<Vec> means(n_classes, Vec(n_features, 0.0));
    if (n_classes == 2)
    {
        const double a = 0.5 * separation / std::sqrt(static_cast<double>(n_features));
        std::fill(means[0].begin(), means[0].end(), -a);
        std::fill(means[1].begin(), means[1].end(), a);
    }
    else
    {
        for (std::size_t c = 0; c < n_classes; ++c)
            means[c][c % n_features] = (c < n_features ? 0.5 : -0.5) * separation;
    }
    Dataset out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        out[i].label = static_cast<int>(i % n_classes);
        out[i].x.resize(n_features);
        for (std::size_t f = 0; f < n_features; ++f)
            out[i].x[f] = means[i % n_classes][f] + rng.normal();
    }
    return out;
}

namespace
{
void shuffle(std::vector<std::size_t> &idx, RngStream &rng)
{
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
}
} // namespace

std::vector<Dataset> partition(const Dataset &data, std::size_t k_devices, std::size_t per_device, Partition scheme,
                               RngStream &rng)
{
    if (k_devices == 0 || per_device == 0)
        throw usage_error("partition: need at least one device and one sample per device");
    if (data.size() < k_devices * per_device)
        throw usage_error("partition: not enough samples for equal-size shards");
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    idx.resize(k_devices * per_device);
    if (scheme == Partition::label_skew)
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return data[a].label < data[b].label; });
    // Contiguous slices: after the label sort each device covers at most two labels
    // whenever per_device <= samples per label.
    std::vector<Dataset> out(k_devices);
    for (std::size_t k = 0; k < k_devices; ++k)
        for (std::size_t j = 0; j < per_device; ++j)
            out[k].push_back(data[idx[k * per_device + j]]);
    return out;
}

// ---- learning primitives ---------------------------------------------------

Vec local_gradient(const Model &model, const ModelParams &w, std::span<const Sample> batch)
{
    if (batch.empty())
        throw usage_error("local_gradient: empty batch");
    if (w.w.size() != model.dim())
        throw usage_error("local_gradient: parameter dimension mismatch");
    Vec g(model.dim(), 0.0);
    for (const auto &s : batch)
        model.accumulate_gradient(w.w, s, g);
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto &x : g)
        x *= inv;
    return g;
}

double batch_loss(const Model &model, const ModelParams &w, std::span<const Sample> batch)
{
    if (batch.empty())
        throw usage_error("batch_loss: empty batch");
    double s = 0.0;
    for (const auto &x : batch)
        s += model.sample_loss(w.w, x);
    return s / static_cast<double>(batch.size());
}

Vec ideal_aggregate(std::span<const Vec> grads)
{
    if (grads.empty())
        throw usage_error("ideal_aggregate: no gradients");
    const std::size_t dim = grads[0].size();
    for (const auto &g : grads)
        if (g.size() != dim)
            throw usage_error("ideal_aggregate: gradient dimension mismatch");
    // Same accumulation order as aircomp::aggregate so unit coefficients reproduce it bit for bit.
    const double kd = static_cast<double>(grads.size());
    Vec out(dim);
    for (std::size_t j = 0; j < dim; ++j)
    {
        double acc = 0.0;
        for (const auto &g : grads)
            acc += g[j];
        out[j] = acc / kd;
    }
    return out;
}

ModelParams global_update(const ModelParams &w, std::span<const double> g, double eta)
{
    if (g.size() != w.w.size())
        throw usage_error("global_update: dimension mismatch");
    detail::require(eta > 0.0, "global_update: eta must be positive");
    ModelParams out{w.w};
    for (std::size_t i = 0; i < g.size(); ++i)
        out.w[i] -= eta * g[i];
    return out;
}

Evaluation evaluate(const Model &model, const ModelParams &w, std::span<const Sample> test)
{
    if (test.empty())
        throw usage_error("evaluate: empty test set");
    Evaluation e;
    std::size_t correct = 0;
    for (const auto &s : test)
    {
        e.loss += model.sample_loss(w.w, s);
        correct += model.predict(w.w, s.x) == s.label ? 1 : 0;
    }
    e.loss /= static_cast<double>(test.size());
    e.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return e;
}

Dataset sample_batch(const Dataset &data, std::size_t batch_size, RngStream &rng)
{
    if (data.empty() || batch_size == 0)
        throw usage_error("sample_batch: empty data or zero batch size");
    const std::size_t n = data.size();
    const std::size_t b = std::min(batch_size, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < b; ++i)
        std::swap(idx[i], idx[i + rng.below(n - i)]);
    Dataset out;
    out.reserve(b);
    for (std::size_t i = 0; i < b; ++i)
        out.push_back(data[idx[i]]);
    return out;
}

// ---- federation and rounds -------------------------------------------------

namespace
{
Dataset idx_dataset(const std::string &images, const std::string &labels)
{
    const auto img = idx::read_images(images);
    const auto lab = idx::read_labels(labels);
    if (img.pixels.size() != lab.size())
        throw usage_error("IDX image and label counts differ");
    Dataset out(lab.size());
    for (std::size_t i = 0; i < lab.size(); ++i)
    {
        out[i].label = lab[i];
        out[i].x.resize(img.pixels[i].size());
        for (std::size_t p = 0; p < img.pixels[i].size(); ++p)
            out[i].x[p] = img.pixels[i][p] / 255.0;
    }
    return out;
}

Dataset subsample(const Dataset &data, std::size_t n, RngStream &rng)
{
    if (n > data.size())
        throw usage_error("requested more samples than the dataset holds");
    return sample_batch(data, n, rng);
}
} // namespace

Federation build_federation(const SystemConfig &cfg)
{
    const auto &tc = cfg.train;
    Federation fed;
    Dataset pool;
    std::size_t n_inputs = tc.n_features;
    RngStream data_rng(cfg.seed, stream_id(StreamTag::data, 0));
    RngStream test_rng(cfg.seed, stream_id(StreamTag::data, 1));
    RngStream split_rng(cfg.seed, stream_id(StreamTag::data, 2));
    if (tc.task == Task::mnist_mlp)
    {
        pool = idx_dataset(tc.idx_train_images, tc.idx_train_labels);
        fed.test = subsample(idx_dataset(tc.idx_test_images, tc.idx_test_labels), tc.test_size, test_rng);
        n_inputs = pool.front().x.size();
    }
    else
    {
        pool = make_blobs(cfg.k_devices * tc.samples_per_device, tc.n_features, tc.n_classes, tc.separation, data_rng);
        fed.test = make_blobs(tc.test_size, tc.n_features, tc.n_classes, tc.separation, test_rng);
    }
    fed.devices = partition(pool, cfg.k_devices, tc.samples_per_device, tc.partition, split_rng);
    fed.model = make_model(tc, n_inputs);

    if (cfg.uniform_distances)
    {
        RngStream rng(cfg.seed, stream_id(StreamTag::distances));
        fed.distances = channel::draw_distances(cfg.k_devices, cfg.d_max, rng);
    }
    else
    {
        if (cfg.distances.size() != cfg.k_devices)
            throw usage_error("build_federation: need one distance per device");
        fed.distances = cfg.distances;
    }
    return fed;
}

namespace
{
double max_norm(std::span<const Vec> grads)
{
    double m = 0.0;
    for (const auto &g : grads)
        m = std::max(m, std::sqrt(aircomp::squared_norm(g)));
    return m;
}

Vec full_gradient(const Federation &fed, const ModelParams &w)
{
    Vec g(fed.model->dim(), 0.0);
    std::size_t n = 0;
    for (const auto &dev : fed.devices)
    {
        for (const auto &s : dev)
            fed.model->accumulate_gradient(w.w, s, g);
        n += dev.size();
    }
    for (auto &x : g)
        x /= static_cast<double>(n);
    return g;
}

double training_loss(const Federation &fed, const ModelParams &w)
{
    double s = 0.0;
    std::size_t n = 0;
    for (const auto &dev : fed.devices)
    {
        for (const auto &x : dev)
            s += fed.model->sample_loss(w.w, x);
        n += dev.size();
    }
    return s / static_cast<double>(n);
}

} // namespace

std::vector<Vec> round_gradients(const Federation &fed, const ModelParams &w, std::size_t batch_size,
                                 std::uint64_t seed, std::size_t round)
{
    std::vector<Vec> grads;
    grads.reserve(fed.devices.size());
    for (std::size_t k = 0; k < fed.devices.size(); ++k)
    {
        RngStream rng(seed, stream_id(StreamTag::batch, round, k));
        const Dataset batch = sample_batch(fed.devices[k], batch_size, rng);
        grads.push_back(local_gradient(*fed.model, w, batch));
    }
    return grads;
}

RoundResult run_round(const ModelParams &w, const RoundContext &ctx, std::size_t round)
{
    if (ctx.federation == nullptr)
        throw usage_error("run_round: no federation");
    const Federation &fed = *ctx.federation;
    const std::size_t k = fed.devices.size();

    const auto grads = round_gradients(fed, w, ctx.batch_size, ctx.seed, round);
    const Vec g = ideal_aggregate(grads);

    RoundResult res;
    RoundRecord &rec = res.record;
    rec.round = round;
    rec.max_grad_norm = max_norm(grads);
    const Vec full = full_gradient(fed, w);
    rec.grad_norm2 = aircomp::squared_norm(full);
    for (std::size_t j = 0; j < g.size(); ++j)
        rec.sgd_noise2 += (g[j] - full[j]) * (g[j] - full[j]);

    if (ctx.mode == AggregationMode::ideal)
    {
        res.next = global_update(w, g, ctx.eta);
        rec.active = k;
    }
    else
    {
        const channel::EstimationModel est{ctx.rho, ctx.alpha};
        RngStream ch_rng(ctx.seed, stream_id(StreamTag::channel, round));
        std::vector<channel::ChannelDraw> draws;
        draws.reserve(k);
        for (std::size_t i = 0; i < k; ++i)
            draws.push_back(channel::draw_channel(est, fed.distances[i], ch_rng));

        aircomp::PowerConfig power = ctx.power;
        if (ctx.genie_g && rec.max_grad_norm > 0.0)
            power.g_bound = rec.max_grad_norm;

        RngStream noise_rng(ctx.seed, stream_id(StreamTag::noise, round));
        const auto out = aircomp::aggregate(grads, draws, ctx.gamma_th, ctx.rho, power, noise_rng, ctx.aggregate_opts);
        for (std::size_t j = 0; j < g.size(); ++j)
            rec.divergence += (out.estimate[j] - g[j]) * (out.estimate[j] - g[j]);

        Vec energies(k);
        for (std::size_t i = 0; i < k; ++i)
            energies[i] = aircomp::squared_norm(grads[i]);
        rec.expected_divergence =
            analysis::divergence_exact(energies, k, ctx.gamma_th, ctx.rho, power, g.size());
        rec.active = out.active_set.size();
        rec.skipped = out.skipped;
        res.next = out.skipped ? w : global_update(w, out.g_hat, ctx.eta);
    }

    rec.loss = training_loss(fed, res.next);
    rec.accuracy = evaluate(*fed.model, res.next, fed.test).accuracy;
    return res;
}

double calibrate_gradient_bound(const Federation &fed, const SystemConfig &cfg)
{
    RngStream init_rng(cfg.seed, stream_id(StreamTag::init));
    ModelParams w = fed.model->init(init_rng);
    double worst = 0.0;
    for (std::size_t m = 0; m < cfg.g_calibration_rounds; ++m)
    {
        const auto grads = round_gradients(fed, w, cfg.train.batch_size, cfg.seed, m);
        worst = std::max(worst, max_norm(grads));
        w = global_update(w, ideal_aggregate(grads), cfg.train.eta);
    }
    if (!(worst > 0.0))
        throw degenerate_config("calibrate_gradient_bound: all warm-up gradients vanished");
    return cfg.g_calibration_factor * worst;
}

aircomp::PowerConfig power_config(const SystemConfig &cfg, const Federation &fed, double g_bound)
{
    aircomp::PowerConfig p;
    p.p_max = cfg.p_max;
    p.sigma2 = cfg.sigma2_watts;
    p.g_bound = g_bound;
    p.d_max_alpha = channel::max_distance_power(fed.distances, cfg.alpha);
    p.validate();
    return p;
}

double resolve_gamma_th(const SystemConfig &cfg, const aircomp::PowerConfig &power)
{
    if (cfg.gamma_th)
        return *cfg.gamma_th;
    const auto mode = optimizer::parse_threshold_mode(cfg.threshold_mode);
    optimizer::SolverOptions opts;
    opts.fixed_gamma = cfg.sweep_fixed_gamma;
    return optimizer::optimal_threshold(optimizer::coefficients_from_system(cfg.rho, power), mode, opts).gamma_star;
}

TrainingTrace train(const SystemConfig &cfg_in)
{
    SystemConfig cfg = cfg_in;
    cfg.resolve();
    const Federation fed = build_federation(cfg);

    TrainingTrace trace;
    trace.g_bound = cfg.g_bound ? *cfg.g_bound : calibrate_gradient_bound(fed, cfg);
    const auto power = power_config(cfg, fed, trace.g_bound);
    trace.d_max_alpha = power.d_max_alpha;
    trace.gamma_th = cfg.mode == AggregationMode::aircomp ? resolve_gamma_th(cfg, power) : 0.0;

    RoundContext ctx;
    ctx.federation = &fed;
    ctx.mode = cfg.mode;
    ctx.rho = cfg.rho;
    ctx.alpha = cfg.alpha;
    ctx.gamma_th = trace.gamma_th;
    ctx.power = power;
    ctx.eta = cfg.train.eta;
    ctx.batch_size = cfg.train.batch_size;
    ctx.seed = cfg.seed;
    ctx.genie_g = cfg.genie_g;

    RngStream init_rng(cfg.seed, stream_id(StreamTag::init));
    ModelParams w = fed.model->init(init_rng);
    trace.initial_loss = training_loss(fed, w);
    trace.initial_accuracy = evaluate(*fed.model, w, fed.test).accuracy;

    trace.records.reserve(cfg.train.rounds_M);
    for (std::size_t m = 0; m < cfg.train.rounds_M; ++m)
    {
        auto res = run_round(w, ctx, m);
        w = std::move(res.next);
        trace.skipped_rounds += res.record.skipped ? 1 : 0;
        trace.records.push_back(res.record);
    }
    trace.final_params = std::move(w);
    return trace;
}

} // namespace airfl::fltrain
