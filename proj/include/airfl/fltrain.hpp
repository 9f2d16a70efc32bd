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

#ifndef AIRFL_FLTRAIN_HPP
#define AIRFL_FLTRAIN_HPP

#include "airfl/aircomp.hpp"
#include "airfl/config.hpp"
#include "airfl/rng.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace airfl::fltrain
{

using Vec = std::vector<double>;

struct Sample
{
    Vec x;
    int label = 0;
};

using Dataset = std::vector<Sample>;

struct ModelParams
{
    Vec w;
};

// Sample-wise cross-entropy model with a flat parameter vector.
class Model
{
public:
    virtual ~Model() = default;
    virtual std::size_t dim() const = 0;
    virtual ModelParams init(RngStream &rng) const = 0;
    virtual double sample_loss(const Vec &w, const Sample &s) const = 0;
    // Adds the gradient of sample_loss at (w, s) into grad.
    virtual void accumulate_gradient(const Vec &w, const Sample &s, Vec &grad) const = 0;
    // Ties resolve to the lowest class index.
    virtual int predict(const Vec &w, const Vec &x) const = 0;
};

/// Binary logistic regression, weights then bias. Label 1 iff sigmoid(w.x + b) > 1/2.
class LogisticModel final : public Model
{
public:
    explicit LogisticModel(std::size_t n_features);
    std::size_t dim() const override { return n_features_ + 1; }
    ModelParams init(RngStream &rng) const override;
    double sample_loss(const Vec &w, const Sample &s) const override;
    void accumulate_gradient(const Vec &w, const Sample &s, Vec &grad) const override;
    int predict(const Vec &w, const Vec &x) const override;

private:
    double logit(const Vec &w, const Vec &x) const;
    std::size_t n_features_;
};

/// One hidden ReLU layer with softmax output.
/// Layout: W1 (hidden x in), b1 (hidden), W2 (classes x hidden), b2 (classes).
class MlpModel final : public Model
{
public:
    MlpModel(std::size_t n_inputs, std::size_t hidden, std::size_t n_classes);
    std::size_t dim() const override;
    ModelParams init(RngStream &rng) const override;
    double sample_loss(const Vec &w, const Sample &s) const override;
    void accumulate_gradient(const Vec &w, const Sample &s, Vec &grad) const override;
    int predict(const Vec &w, const Vec &x) const override;

private:
    void forward(const Vec &w, const Vec &x, Vec &hidden, Vec &logits) const;
    std::size_t in_, hid_, out_;
};

std::unique_ptr<Model> make_model(const TrainConfig &tc, std::size_t n_inputs);

// Two or more Gaussian blobs with unit covariance; labels cycle 0..n_classes-1.
Dataset make_blobs(std::size_t n, std::size_t n_features, std::size_t n_classes, double separation, RngStream &rng);

std::vector<Dataset> partition(const Dataset &data, std::size_t k_devices, std::size_t per_device, Partition scheme,
                               RngStream &rng);

// Mean gradient of the sample losses over the batch.
Vec local_gradient(const Model &model, const ModelParams &w, std::span<const Sample> batch);

double batch_loss(const Model &model, const ModelParams &w, std::span<const Sample> batch);

Vec ideal_aggregate(std::span<const Vec> grads);

ModelParams global_update(const ModelParams &w, std::span<const double> g, double eta);

struct Evaluation
{
    double loss = 0.0;
    double accuracy = 0.0;
};

Evaluation evaluate(const Model &model, const ModelParams &w, std::span<const Sample> test);

// Without-replacement draw of batch_size samples (whole set when smaller).
Dataset sample_batch(const Dataset &data, std::size_t batch_size, RngStream &rng);

struct Federation
{
    std::unique_ptr<Model> model;
    std::vector<Dataset> devices;
    Dataset test;
    std::vector<double> distances;
};

Federation build_federation(const SystemConfig &cfg);

struct RoundRecord
{
    std::size_t round = 0;
    double loss = 0.0;     // global training loss after the update
    double accuracy = 0.0; // test accuracy after the update
    double divergence = 0.0;          // measured ||estimate - g||^2
    double expected_divergence = 0.0; // closed-form value for this round's gradients
    double grad_norm2 = 0.0;          // ||grad F(w_m)||^2 over all device data
    double sgd_noise2 = 0.0;          // ||g_m - grad F(w_m)||^2
    double max_grad_norm = 0.0;
    std::size_t active = 0;
    bool skipped = false;
};

struct TrainingTrace
{
    std::vector<RoundRecord> records;
    ModelParams final_params;
    double initial_loss = 0.0;
    double initial_accuracy = 0.0;
    double gamma_th = 0.0;
    double g_bound = 0.0;
    double d_max_alpha = 0.0;
    std::size_t skipped_rounds = 0;
};

struct RoundContext
{
    const Federation *federation = nullptr;
    AggregationMode mode = AggregationMode::aircomp;
    double rho = 1.0;
    double alpha = 2.2;
    double gamma_th = 0.5;
    aircomp::PowerConfig power;
    double eta = 0.005;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    bool genie_g = false;
    aircomp::AggregateOptions aggregate_opts;
};

struct RoundResult
{
    ModelParams next;
    RoundRecord record;
};

/// One round: K mini-batch gradients, aggregation by ctx.mode, global update
/// (skipped when no device is active). In aircomp mode both aggregates are
/// computed so the record carries the measured distortion.
RoundResult run_round(const ModelParams &w, const RoundContext &ctx, std::size_t round);

// K local mini-batch gradients at w for the given round (batch streams keyed by round, device).
std::vector<Vec> round_gradients(const Federation &fed, const ModelParams &w, std::size_t batch_size,
                                 std::uint64_t seed, std::size_t round);

// G = factor * max local-gradient norm over an ideal-mode warm-up.
double calibrate_gradient_bound(const Federation &fed, const SystemConfig &cfg);

// Truncation threshold implied by cfg: the fixed gamma_th, or the optimiser's choice.
double resolve_gamma_th(const SystemConfig &cfg, const aircomp::PowerConfig &power);

aircomp::PowerConfig power_config(const SystemConfig &cfg, const Federation &fed, double g_bound);

TrainingTrace train(const SystemConfig &cfg);

} // namespace airfl::fltrain

#endif
