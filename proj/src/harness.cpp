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

#include "airfl/harness.hpp"
#include "airfl/analysis.hpp"
#include "airfl/channel.hpp"
#include "airfl/error.hpp"
#include "airfl/optimizer.hpp"
#include "airfl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace airfl::harness
{

bool within_se(double estimate, double reference, double se, double k)
{
    return std::fabs(estimate - reference) <= k * se;
}

namespace
{
// Raw power sums of shifted samples; merged in chunk order.
struct PowerSums
{
    double n = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;

    void add(double e)
    {
        const double e2 = e * e;
        n += 1;
        s1 += e;
        s2 += e2;
        s3 += e2 * e;
        s4 += e2 * e2;
    }
    void merge(const PowerSums &o)
    {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        s4 += o.s4;
    }
};

std::size_t chunk_count(std::size_t n)
{
    return (n + kChunk - 1) / kChunk;
}

std::size_t chunk_size(std::size_t n, std::size_t c)
{
    return std::min(kChunk, n - c * kChunk);
}

double mean_of(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

// Standard error of the mean of v (zero for a single value).
double se_of(std::span<const double> v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::string fmt_label(const char *f, double a, double b)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}
} // namespace

XiMoments mc_xi_moments(double rho, double gamma_th, std::size_t n_samples, std::uint64_t seed, std::size_t workers)
{
    if (n_samples < 10000)
        throw usage_error("mc_xi_moments: need at least 1e4 samples");
    const double lambda = aircomp::compensation_lambda(gamma_th, rho);
    const channel::EstimationModel model{rho, 2.2};
    model.validate();

    const auto parts = run_indexed<PowerSums>(chunk_count(n_samples), workers, [&](std::size_t c) {
        RngStream rng(seed, stream_id(StreamTag::trial, c, 0));
        PowerSums ps;
        for (std::size_t i = 0; i < chunk_size(n_samples, c); ++i)
        {
            const auto draw = channel::draw_channel(model, 1.0, rng);
            ps.add(aircomp::effective_xi(draw, gamma_th, lambda) - 1.0);
        }
        return ps;
    });
    PowerSums tot;
    for (const auto &p : parts)
        tot.merge(p);

    const double n = tot.n;
    const double m = tot.s1 / n; // mean of xi - 1
    const double m2 = tot.s2 / n - m * m;
    const double m4 = tot.s4 / n - 4.0 * m * tot.s3 / n + 6.0 * m * m * tot.s2 / n - 3.0 * m * m * m * m;
    XiMoments out;
    out.n = n_samples;
    out.mean = 1.0 + m;
    out.variance = m2 * n / (n - 1.0);
    out.se_mean = std::sqrt(out.variance / n);
    out.se_var = std::sqrt(std::max(0.0, m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n);
    return out;
}

MeanEstimate mc_conditional_second_moment(double gamma_th, double c, std::size_t n_samples, std::uint64_t seed,
                                          std::size_t workers)
{
    detail::require(gamma_th > 0.0, "mc_conditional_second_moment: gamma_th must be positive");
    if (n_samples < 10000)
        throw usage_error("mc_conditional_second_moment: need at least 1e4 samples");
    const channel::EstimationModel model{0.5, 2.2}; // x does not depend on rho

    const auto parts = run_indexed<PowerSums>(chunk_count(n_samples), workers, [&](std::size_t ch) {
        RngStream rng(seed, stream_id(StreamTag::trial, ch, 1));
        PowerSums ps;
        for (std::size_t i = 0; i < chunk_size(n_samples, ch); ++i)
        {
            const auto draw = channel::draw_channel(model, 1.0, rng);
            if (!channel::is_active(draw.h_hat, gamma_th))
                continue;
            const double x = std::real(std::conj(draw.v) * draw.h_hat) / std::norm(draw.h_hat);
            ps.add((x - c) * (x - c));
        }
        return ps;
    });
    PowerSums tot;
    for (const auto &p : parts)
        tot.merge(p);
    if (tot.n < 2)
        throw degenerate_config("mc_conditional_second_moment: fewer than two active draws");
    MeanEstimate out;
    out.n = static_cast<std::size_t>(tot.n);
    out.mean = tot.s1 / tot.n;
    const double var = (tot.s2 - tot.n * out.mean * out.mean) / (tot.n - 1.0);
    out.se = std::sqrt(std::max(0.0, var) / tot.n);
    return out;
}

double pdf_cell_mass(double t0, double t1, double g0, double g1)
{
    constexpr int panels = 64; // even
    const double ht = (t1 - t0) / panels;
    const double hg = (g1 - g0) / panels;
    auto w = [](int i) { return (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double s = 0.0;
    for (int i = 0; i <= panels; ++i)
        for (int j = 0; j <= panels; ++j)
            s += w(i) * w(j) * analysis::joint_pdf_xy(t0 + i * ht, g0 + j * hg);
    return s * ht * hg / 9.0;
}

JointPdfCheck mc_joint_distribution_check(const PdfGrid &grid, double tail_gamma, std::size_t n_samples,
                                          std::uint64_t seed, std::size_t workers)
{
    if (n_samples < 1000000)
        throw usage_error("mc_joint_distribution_check: need at least 1e6 samples");
    detail::require(grid.t_min < grid.t_max && grid.gamma_min < grid.gamma_max && grid.gamma_max < 0.0,
                    "mc_joint_distribution_check: bad grid");
    detail::require(grid.bins_t >= 1 && grid.bins_gamma >= 1, "mc_joint_distribution_check: need bins");
    detail::require(tail_gamma > 0.0, "mc_joint_distribution_check: tail_gamma must be positive");

    const std::size_t nb = grid.bins_t * grid.bins_gamma;
    const double dt = (grid.t_max - grid.t_min) / static_cast<double>(grid.bins_t);
    const double dg = (grid.gamma_max - grid.gamma_min) / static_cast<double>(grid.bins_gamma);
    const channel::EstimationModel model{0.5, 2.2};

    struct Part
    {
        std::vector<std::uint64_t> counts;
        std::uint64_t tail = 0;
        PowerSums moment;
    };
    const auto parts = run_indexed<Part>(chunk_count(n_samples), workers, [&](std::size_t ch) {
        RngStream rng(seed, stream_id(StreamTag::trial, ch, 2));
        Part p;
        p.counts.assign(nb, 0);
        for (std::size_t i = 0; i < chunk_size(n_samples, ch); ++i)
        {
            const auto draw = channel::draw_channel(model, 1.0, rng);
            const double r = std::norm(draw.h_hat);
            const double x = std::real(std::conj(draw.v) * draw.h_hat) / r;
            const double y = -r;
            if (y <= -tail_gamma)
            {
                ++p.tail;
                p.moment.add(x * x);
            }
            const double ft = std::floor((x - grid.t_min) / dt);
            const double fg = std::floor((y - grid.gamma_min) / dg);
            if (ft < 0 || fg < 0 || ft >= static_cast<double>(grid.bins_t) ||
                fg >= static_cast<double>(grid.bins_gamma))
                continue;
            ++p.counts[static_cast<std::size_t>(ft) * grid.bins_gamma + static_cast<std::size_t>(fg)];
        }
        return p;
    });

    std::vector<std::uint64_t> counts(nb, 0);
    std::uint64_t tail = 0;
    PowerSums moment;
    for (const auto &p : parts)
    {
        for (std::size_t b = 0; b < nb; ++b)
            counts[b] += p.counts[b];
        tail += p.tail;
        moment.merge(p.moment);
    }

    JointPdfCheck out;
    out.n = n_samples;
    const double n = static_cast<double>(n_samples);
    out.bins.name = "verify_pdf";
    out.bins.columns = {"t_center", "gamma_center", "mass_mc", "mass_se", "mass_exact"};
    double l1 = 0.0;
    for (std::size_t it = 0; it < grid.bins_t; ++it)
    {
        for (std::size_t ig = 0; ig < grid.bins_gamma; ++ig)
        {
            const double t0 = grid.t_min + static_cast<double>(it) * dt;
            const double g0 = grid.gamma_min + static_cast<double>(ig) * dg;
            const double p = static_cast<double>(counts[it * grid.bins_gamma + ig]) / n;
            const double exact = pdf_cell_mass(t0, t0 + dt, g0, g0 + dg);
            l1 += std::fabs(p - exact);
            out.bins.rows.push_back(
                {"bin", {t0 + dt / 2, g0 + dg / 2, p, std::sqrt(p * (1.0 - p) / n), exact}});
        }
    }
    out.total_variation = 0.5 * l1;

    out.tail_mc = static_cast<double>(tail) / n;
    out.tail_se = std::sqrt(out.tail_mc * (1.0 - out.tail_mc) / n);
    out.tail_exact = std::exp(-tail_gamma);
    out.moment_exact = analysis::conditional_second_moment(tail_gamma, 0.0);
    if (moment.n >= 2)
    {
        out.moment_mc = moment.s1 / moment.n;
        const double var = (moment.s2 - moment.n * out.moment_mc * out.moment_mc) / (moment.n - 1.0);
        out.moment_se = std::sqrt(std::max(0.0, var) / moment.n);
    }
    return out;
}

DivergenceCheck mc_weight_divergence(std::span<const Vec> grads, std::span<const double> distances, double rho,
                                     double alpha, double gamma_th, const aircomp::PowerConfig &power,
                                     std::size_t n_trials, std::uint64_t seed, std::size_t workers)
{
    if (n_trials < 1000)
        throw usage_error("mc_weight_divergence: need at least 1e3 trials");
    const std::size_t k = grads.size();
    if (k == 0 || distances.size() != k)
        throw usage_error("mc_weight_divergence: need one distance per gradient");
    const Vec ideal = fltrain::ideal_aggregate(grads);
    const channel::EstimationModel model{rho, alpha};
    model.validate();

    struct Trial
    {
        double d2 = 0.0;
        bool skipped = false;
    };
    const auto trials = run_indexed<Trial>(n_trials, workers, [&](std::size_t t) {
        RngStream rng(seed, stream_id(StreamTag::trial, t, 3));
        std::vector<channel::ChannelDraw> draws;
        draws.reserve(k);
        for (std::size_t i = 0; i < k; ++i)
            draws.push_back(channel::draw_channel(model, distances[i], rng));
        const auto out = aircomp::aggregate(grads, draws, gamma_th, rho, power, rng);
        Trial tr;
        for (std::size_t j = 0; j < ideal.size(); ++j)
            tr.d2 += (out.estimate[j] - ideal[j]) * (out.estimate[j] - ideal[j]);
        tr.skipped = out.skipped;
        return tr;
    });

    Vec d2(n_trials);
    std::size_t skipped = 0;
    for (std::size_t t = 0; t < n_trials; ++t)
    {
        d2[t] = trials[t].d2;
        skipped += trials[t].skipped ? 1 : 0;
    }
    Vec energies(k);
    for (std::size_t i = 0; i < k; ++i)
        energies[i] = aircomp::squared_norm(grads[i]);

    DivergenceCheck out;
    out.trials = n_trials;
    out.mc = mean_of(d2);
    out.se = se_of(d2);
    out.exact = analysis::divergence_exact(energies, k, gamma_th, rho, power, ideal.size());
    out.noise_exact = analysis::noise_energy(k, gamma_th, rho, power, ideal.size());
    out.bound = analysis::divergence_bound(k, gamma_th, rho, power);
    out.bound_violated = out.exact > out.bound;
    out.skipped_fraction = static_cast<double>(skipped) / static_cast<double>(n_trials);
    return out;
}

FrozenRound frozen_round(const SystemConfig &cfg_in)
{
    SystemConfig cfg = cfg_in;
    cfg.resolve();
    const auto fed = fltrain::build_federation(cfg);
    RngStream init_rng(cfg.seed, stream_id(StreamTag::init));
    const auto w0 = fed.model->init(init_rng);

    FrozenRound fr;
    fr.grads = fltrain::round_gradients(fed, w0, cfg.train.batch_size, cfg.seed, 0);
    fr.distances = fed.distances;
    double g = 0.0;
    for (const auto &v : fr.grads)
        g = std::max(g, std::sqrt(aircomp::squared_norm(v)));
    fr.power = fltrain::power_config(cfg, fed, cfg.g_bound ? *cfg.g_bound : g);
    fr.gamma_th = fltrain::resolve_gamma_th(cfg, fr.power);
    return fr;
}

DivergenceCheck mc_weight_divergence(const SystemConfig &cfg, std::size_t n_trials)
{
    const auto fr = frozen_round(cfg);
    return mc_weight_divergence(fr.grads, fr.distances, cfg.rho, cfg.alpha, fr.gamma_th, fr.power, n_trials, cfg.seed,
                                cfg.workers);
}

double loglog_slope(std::span<const std::size_t> k, std::span<const double> y)
{
    if (k.size() != y.size() || k.size() < 2)
        throw usage_error("loglog_slope: need at least two matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
    {
        detail::require(k[i] > 0 && y[i] > 0.0, "loglog_slope: values must be positive");
        const double lx = std::log(static_cast<double>(k[i]));
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

KScaling k_scaling(const SystemConfig &cfg, std::size_t n_trials)
{
    const auto base = frozen_round(cfg);
    KScaling out;
    out.k_values = cfg.divergence_k_sweep;
    Vec mc, exact, bound;
    for (std::size_t K : out.k_values)
    {
        detail::require(K >= 1, "k_scaling: K must be positive");
        std::vector<Vec> grads;
        std::vector<double> dist;
        for (std::size_t i = 0; i < K; ++i)
        {
            grads.push_back(base.grads[i % base.grads.size()]);
            dist.push_back(base.distances[i % base.distances.size()]);
        }
        out.checks.push_back(mc_weight_divergence(grads, dist, cfg.rho, cfg.alpha, base.gamma_th, base.power, n_trials,
                                                  cfg.seed + K, cfg.workers));
        mc.push_back(out.checks.back().mc);
        exact.push_back(out.checks.back().exact);
        bound.push_back(out.checks.back().bound);
    }
    out.slope_mc = loglog_slope(out.k_values, mc);
    out.slope_exact = loglog_slope(out.k_values, exact);
    out.slope_bound = loglog_slope(out.k_values, bound);
    return out;
}

std::vector<SweepPoint> sweep_threshold(const SystemConfig &cfg_in)
{
    SystemConfig cfg = cfg_in;
    cfg.resolve();
    if (cfg.sweep_seeds < 1)
        throw usage_error("sweep_threshold: need at least one seed");

    struct Job
    {
        std::string label;
        std::optional<double> gamma;
    };
    std::vector<Job> jobs;
    for (double g : cfg.sweep_gammas)
        jobs.push_back({"grid", g});
    for (const auto &m : cfg.sweep_modes)
    {
        optimizer::parse_threshold_mode(m);
        jobs.push_back({m, std::nullopt});
    }
    if (jobs.empty())
        throw usage_error("sweep_threshold: nothing to sweep");

    struct Run
    {
        double gamma = 0, accuracy = 0, divergence = 0, expected = 0, loss = 0, skipped = 0;
    };
    const std::size_t S = cfg.sweep_seeds;
    const auto runs = run_indexed<Run>(jobs.size() * S, cfg.workers, [&](std::size_t idx) {
        const Job &job = jobs[idx / S];
        SystemConfig c = cfg;
        c.seed = cfg.seed + idx % S;
        c.mode = AggregationMode::aircomp;
        c.gamma_th = job.gamma;
        if (!job.gamma)
            c.threshold_mode = job.label;
        c.workers = 1;
        const auto trace = fltrain::train(c);
        Run r;
        r.gamma = trace.gamma_th;
        r.accuracy = trace.records.back().accuracy;
        r.loss = trace.records.back().loss;
        for (const auto &rec : trace.records)
        {
            r.divergence += rec.divergence;
            r.expected += rec.expected_divergence;
        }
        const double m = static_cast<double>(trace.records.size());
        r.divergence /= m;
        r.expected /= m;
        r.skipped = static_cast<double>(trace.skipped_rounds) / m;
        return r;
    });

    std::vector<SweepPoint> out;
    for (std::size_t j = 0; j < jobs.size(); ++j)
    {
        Vec gamma, acc, div, exp, loss, skip;
        for (std::size_t s = 0; s < S; ++s)
        {
            const Run &r = runs[j * S + s];
            gamma.push_back(r.gamma);
            acc.push_back(r.accuracy);
            div.push_back(r.divergence);
            exp.push_back(r.expected);
            loss.push_back(r.loss);
            skip.push_back(r.skipped);
        }
        SweepPoint p;
        p.label = jobs[j].label;
        p.gamma_mean = mean_of(gamma);
        p.accuracy_mean = mean_of(acc);
        p.accuracy_se = se_of(acc);
        p.divergence_mean = mean_of(div);
        p.divergence_se = se_of(div);
        p.expected_divergence = mean_of(exp);
        p.loss_mean = mean_of(loss);
        p.loss_se = se_of(loss);
        p.skipped_fraction = mean_of(skip);
        out.push_back(p);
    }
    return out;
}

report::SweepResult sweep_table(const std::vector<SweepPoint> &points)
{
    report::SweepResult r;
    r.name = "sweep_threshold";
    r.columns = {"gamma_th", "accuracy_mc", "accuracy_se", "divergence_mc", "divergence_se",
                 "divergence_exact", "loss_mc", "loss_se", "skipped_fraction"};
    for (const auto &p : points)
        r.rows.push_back({p.label,
                          {p.gamma_mean, p.accuracy_mean, p.accuracy_se, p.divergence_mean, p.divergence_se,
                           p.expected_divergence, p.loss_mean, p.loss_se, p.skipped_fraction}});
    return r;
}

report::SweepResult xi_table(const SystemConfig &cfg, std::size_t n_samples, bool *all_pass)
{
    report::SweepResult r;
    r.name = "verify_xi";
    r.columns = {"rho",        "gamma_th",       "mean_mc",   "mean_se",   "variance_mc", "variance_se",
                 "variance_exact", "moment_mc", "moment_se", "moment_exact", "c",       "pass"};
    bool ok = true;
    std::uint64_t cell = 0;
    for (double rho : cfg.verify_rhos)
    {
        for (double g : cfg.verify_gammas)
        {
            const std::uint64_t seed = cfg.seed + 1000 * cell++;
            const auto m = mc_xi_moments(rho, g, n_samples, seed, cfg.workers);
            const double c = rho < 1.0 ? analysis::offset_c(g, rho) : 0.0;
            const auto cm = mc_conditional_second_moment(g, c, n_samples, seed, cfg.workers);
            const double var_exact = analysis::xi_variance(g, rho);
            const double mom_exact = analysis::conditional_second_moment(g, c);
            bool pass = within_se(m.mean, 1.0, m.se_mean) && within_se(m.variance, var_exact, m.se_var) &&
                        within_se(cm.mean, mom_exact, cm.se);
            if (var_exact > 0.1)
                pass = pass && std::fabs(m.variance - var_exact) / var_exact < 0.02;
            ok = ok && pass;
            r.rows.push_back({fmt_label("rho=%g;gamma=%g", rho, g),
                              {rho, g, m.mean, m.se_mean, m.variance, m.se_var, var_exact, cm.mean, cm.se, mom_exact,
                               c, pass ? 1.0 : 0.0}});
        }
    }
    if (all_pass)
        *all_pass = ok;
    return r;
}

report::SweepResult trace_table(const fltrain::TrainingTrace &trace)
{
    report::SweepResult r;
    r.name = "train";
    r.columns = {"round",      "loss",       "accuracy", "divergence", "expected_divergence",
                 "grad_norm2", "sgd_noise2", "active",   "skipped"};
    for (const auto &rec : trace.records)
        r.rows.push_back({"round",
                          {static_cast<double>(rec.round), rec.loss, rec.accuracy, rec.divergence,
                           rec.expected_divergence, rec.grad_norm2, rec.sgd_noise2, static_cast<double>(rec.active),
                           rec.skipped ? 1.0 : 0.0}});
    return r;
}

const std::vector<std::string> &command_names()
{
    static const std::vector<std::string> names{"verify-xi",          "verify-pdf",      "verify-divergence",
                                                "optimize-threshold", "sweep-threshold", "train"};
    return names;
}

std::size_t default_trials(const std::string &command)
{
    if (command == "verify-xi")
        return 1000000;
    if (command == "verify-pdf")
        return 10000000;
    if (command == "verify-divergence")
        return 100000;
    return 0;
}

namespace
{
report::SweepResult pdf_table(const SystemConfig &cfg, bool *pass)
{
    const PdfGrid grid{cfg.pdf_t_min, cfg.pdf_t_max, cfg.pdf_gamma_min, cfg.pdf_gamma_max, cfg.pdf_bins_t,
                       cfg.pdf_bins_gamma};
    auto chk = mc_joint_distribution_check(grid, cfg.pdf_tail_gamma, cfg.trials, cfg.seed, cfg.workers);
    const double g = cfg.pdf_tail_gamma;
    auto &rows = chk.bins.rows;
    rows.push_back({"tail", {0.0, -g, chk.tail_mc, chk.tail_se, chk.tail_exact}});
    rows.push_back({"moment", {0.0, -g, chk.moment_mc, chk.moment_se, chk.moment_exact}});
    rows.push_back({"total_variation", {0.0, 0.0, chk.total_variation, 0.0, 0.0}});
    *pass = chk.total_variation < 0.02 && within_se(chk.tail_mc, chk.tail_exact, chk.tail_se) &&
            within_se(chk.moment_mc, chk.moment_exact, chk.moment_se);
    return std::move(chk.bins);
}

report::SweepResult divergence_table(const SystemConfig &cfg, bool *pass)
{
    report::SweepResult r;
    r.name = "verify_divergence";
    r.columns = {"k_devices",  "gamma_th",    "divergence_mc",    "divergence_se",  "divergence_exact",
                 "divergence_bound", "noise_exact", "skipped_fraction", "bound_violated"};
    const auto fr = frozen_round(cfg);
    auto row = [&](const std::string &label, std::size_t k, const DivergenceCheck &d) {
        r.rows.push_back({label,
                          {static_cast<double>(k), fr.gamma_th, d.mc, d.se, d.exact, d.bound, d.noise_exact,
                           d.skipped_fraction, d.bound_violated ? 1.0 : 0.0}});
        *pass = *pass && within_se(d.mc, d.exact, d.se);
    };
    *pass = true;
    row("frozen", cfg.k_devices,
        mc_weight_divergence(fr.grads, fr.distances, cfg.rho, cfg.alpha, fr.gamma_th, fr.power, cfg.trials, cfg.seed,
                             cfg.workers));
    const auto ks = k_scaling(cfg, cfg.trials);
    for (std::size_t i = 0; i < ks.k_values.size(); ++i)
        row("k_sweep", ks.k_values[i], ks.checks[i]);
    return r;
}

report::SweepResult threshold_table(const SystemConfig &cfg)
{
    report::SweepResult r;
    r.name = "optimize_threshold";
    r.columns = {"gamma_star", "h_value", "derivative_residual", "iterations", "k1", "k2"};
    SystemConfig c = cfg;
    c.resolve();
    const auto fed = fltrain::build_federation(c);
    const double g = c.g_bound ? *c.g_bound : 1.0; // G does not enter k1 or k2
    const auto coef = optimizer::coefficients_from_system(c.rho, fltrain::power_config(c, fed, g));
    optimizer::SolverOptions opts;
    opts.fixed_gamma = c.sweep_fixed_gamma;
    for (const auto &name : c.sweep_modes)
    {
        const auto mode = optimizer::parse_threshold_mode(name);
        if (mode == optimizer::ThresholdMode::computation_oriented && coef.k1 == 0.0)
            continue; // no interior optimum with perfect CSI
        const auto s = optimizer::optimal_threshold(coef, mode, opts);
        r.rows.push_back({name,
                          {s.gamma_star, s.h_value, s.derivative_residual, static_cast<double>(s.iterations),
                           coef.k1, coef.k2}});
    }
    return r;
}
} // namespace

report::SweepResult run_command(const std::string &command, SystemConfig &cfg, bool *checks_passed)
{
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
        throw usage_error("unknown command '" + command + "'");
    if (cfg.trials == 0)
        cfg.trials = default_trials(command);
    cfg.resolve();
    bool pass = true;
    report::SweepResult r;
    if (command == "verify-xi")
        r = xi_table(cfg, cfg.trials, &pass);
    else if (command == "verify-pdf")
        r = pdf_table(cfg, &pass);
    else if (command == "verify-divergence")
        r = divergence_table(cfg, &pass);
    else if (command == "optimize-threshold")
        r = threshold_table(cfg);
    else if (command == "sweep-threshold")
        r = sweep_table(sweep_threshold(cfg));
    else
        r = trace_table(fltrain::train(cfg));
    if (checks_passed)
        *checks_passed = pass;
    return r;
}

} // namespace airfl::harness
