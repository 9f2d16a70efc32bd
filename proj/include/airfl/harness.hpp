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

#ifndef AIRFL_HARNESS_HPP
#define AIRFL_HARNESS_HPP

#include "airfl/aircomp.hpp"
#include "airfl/config.hpp"
#include "airfl/fltrain.hpp"
#include "airfl/report.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace airfl::harness
{

using Vec = std::vector<double>;

// Monte-Carlo checks pass when |estimate - reference| <= 4 standard errors.
inline constexpr double kSigmaRule = 4.0;

bool within_se(double estimate, double reference, double se, double k = kSigmaRule);

// Samples per RNG stream in chunked Monte-Carlo loops; fixed so results do not
// depend on the worker count.
inline constexpr std::size_t kChunk = std::size_t{1} << 16;

struct XiMoments
{
    double mean = 0.0;
    double variance = 0.0; // unbiased sample variance
    double se_mean = 0.0;
    double se_var = 0.0; // fourth-central-moment estimator
    std::size_t n = 0;
};

// Moments of the effective coefficient xi over n independent channel draws.
XiMoments mc_xi_moments(double rho, double gamma_th, std::size_t n_samples, std::uint64_t seed,
                        std::size_t workers = 1);

struct MeanEstimate
{
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0; // samples that entered the mean
};

// E[(x - c)^2 | |h_hat|^2 >= gamma_th] with x = Re{v* h_hat}/|h_hat|^2.
MeanEstimate mc_conditional_second_moment(double gamma_th, double c, std::size_t n_samples, std::uint64_t seed,
                                          std::size_t workers = 1);

struct PdfGrid
{
    double t_min = -3.0, t_max = 3.0;
    double gamma_min = -4.0, gamma_max = -0.1;
    std::size_t bins_t = 40, bins_gamma = 40;
};

struct JointPdfCheck
{
    report::SweepResult bins; // per-bin empirical vs analytic mass
    double total_variation = 0.0;
    double tail_mc = 0.0, tail_se = 0.0, tail_exact = 0.0;         // Pr{y <= -tail_gamma}
    double moment_mc = 0.0, moment_se = 0.0, moment_exact = 0.0; // E[x^2 | y <= -tail_gamma]
    std::size_t n = 0;
};

// Analytic mass of one (t, gamma) cell: composite 2-D Simpson, 64 x 64 panels.
double pdf_cell_mass(double t0, double t1, double g0, double g1);

JointPdfCheck mc_joint_distribution_check(const PdfGrid &grid, double tail_gamma, std::size_t n_samples,
                                          std::uint64_t seed, std::size_t workers = 1);

struct DivergenceCheck
{
    double mc = 0.0;
    double se = 0.0;
    double exact = 0.0;
    double bound = 0.0;
    double noise_exact = 0.0;
    bool bound_violated = false;
    double skipped_fraction = 0.0;
    std::size_t trials = 0;
};

struct FrozenRound
{
    std::vector<Vec> grads;
    std::vector<double> distances;
    aircomp::PowerConfig power;
    double gamma_th = 0.0;
};

// One round of local gradients at the initial model, with the power setup and
// threshold implied by cfg. G defaults to the largest frozen gradient norm.
FrozenRound frozen_round(const SystemConfig &cfg);

/// Repeats aggregation of fixed gradients over fresh channels and noise; trial
/// i draws from stream (seed, trial i).
DivergenceCheck mc_weight_divergence(std::span<const Vec> grads, std::span<const double> distances, double rho,
                                     double alpha, double gamma_th, const aircomp::PowerConfig &power,
                                     std::size_t n_trials, std::uint64_t seed, std::size_t workers = 1);

DivergenceCheck mc_weight_divergence(const SystemConfig &cfg, std::size_t n_trials);

struct KScaling
{
    std::vector<std::size_t> k_values;
    std::vector<DivergenceCheck> checks;
    double slope_mc = 0.0;    // least-squares log-log slope of the MC estimates
    double slope_exact = 0.0; // same for the exact values
    double slope_bound = 0.0; // same for the printed bound (-2 by construction)
};

// Replicates the frozen round's devices cyclically to each K, keeping per-device
// gradient norms and distances fixed.
KScaling k_scaling(const SystemConfig &cfg, std::size_t n_trials);

double loglog_slope(std::span<const std::size_t> k, std::span<const double> y);

struct SweepPoint
{
    std::string label; // "grid" or threshold mode
    double gamma_mean = 0.0;
    double accuracy_mean = 0.0, accuracy_se = 0.0;
    double divergence_mean = 0.0, divergence_se = 0.0;
    double expected_divergence = 0.0;
    double loss_mean = 0.0, loss_se = 0.0;
    double skipped_fraction = 0.0;
};

/// Trains once per (threshold, seed): every grid threshold plus every requested
/// mode, seeds cfg.seed, cfg.seed + 1, ... Reports mean +- SE across seeds.
std::vector<SweepPoint> sweep_threshold(const SystemConfig &cfg);
report::SweepResult sweep_table(const std::vector<SweepPoint> &points);

report::SweepResult xi_table(const SystemConfig &cfg, std::size_t n_samples, bool *all_pass = nullptr);
report::SweepResult trace_table(const fltrain::TrainingTrace &trace);

// Command names accepted by run_command.
const std::vector<std::string> &command_names();

// Trial count used when cfg.trials is zero.
std::size_t default_trials(const std::string &command);

// Runs one named experiment and returns its table. cfg.trials is replaced by the
// count actually used so that the config can be written out as a manifest.
// checks_passed reports the 4-SE checks of verify-* commands and is true otherwise.
report::SweepResult run_command(const std::string &command, SystemConfig &cfg, bool *checks_passed = nullptr);

} // namespace airfl::harness

#endif
