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

#include "airfl/analysis.hpp"
#include "airfl/config.hpp"
#include "airfl/error.hpp"
#include "airfl/fltrain.hpp"
#include "airfl/harness.hpp"
#include "airfl/optimizer.hpp"
#include "airfl/specfun.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

namespace py = pybind11;
using namespace airfl;

namespace
{
// Config from a {key: value} mapping; values may be numbers or strings.
SystemConfig make_config(const std::map<std::string, py::object> &overrides)
{
    KeyValues kv;
    for (const auto &[k, v] : overrides)
        kv[k] = py::str(v).cast<std::string>();
    SystemConfig cfg;
    apply_key_values(cfg, kv);
    return cfg;
}

aircomp::PowerConfig make_power(double p_max, double sigma2, double g_bound, double d_max_alpha)
{
    aircomp::PowerConfig p{p_max, sigma2, g_bound, d_max_alpha};
    p.validate();
    return p;
}

py::dict table_to_dict(const report::SweepResult &r)
{
    py::dict d;
    d["name"] = r.name;
    d["columns"] = r.columns;
    py::list labels, values;
    for (const auto &row : r.rows)
    {
        labels.append(row.label);
        values.append(row.values);
    }
    d["labels"] = labels;
    d["values"] = values;
    return d;
}
} // namespace

PYBIND11_MODULE(_airfl, m)
{
    m.doc() = "Over-the-air federated learning under imperfect CSI";

    py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
    py::register_exception<usage_error>(m, "UsageError", PyExc_ValueError);
    py::register_exception<degenerate_config>(m, "DegenerateConfig", PyExc_RuntimeError);

    m.def("exp_integral_ei", &specfun::exp_integral_ei, py::arg("x"));
    m.def("erf", &specfun::erf, py::arg("x"));
    m.def("erfc", &specfun::erfc, py::arg("x"));

    m.def("compensation_lambda", &aircomp::compensation_lambda, py::arg("gamma_th"), py::arg("rho"));
    m.def("dbm_to_watts", &aircomp::dbm_to_watts, py::arg("dbm"));
    m.def("xi_variance", &analysis::xi_variance, py::arg("gamma_th"), py::arg("rho"));
    m.def("joint_cdf_xy", &analysis::joint_cdf_xy, py::arg("t"), py::arg("gamma"));
    m.def("joint_pdf_xy", &analysis::joint_pdf_xy, py::arg("t"), py::arg("gamma"));
    m.def("conditional_second_moment", &analysis::conditional_second_moment, py::arg("gamma_th"), py::arg("c"));

    m.def(
        "divergence_bound",
        [](std::size_t k, double gamma_th, double rho, double p_max, double sigma2, double g_bound,
           double d_max_alpha) {
            return analysis::divergence_bound(k, gamma_th, rho, make_power(p_max, sigma2, g_bound, d_max_alpha));
        },
        py::arg("k_devices"), py::arg("gamma_th"), py::arg("rho"), py::arg("p_max"), py::arg("sigma2"),
        py::arg("g_bound"), py::arg("d_max_alpha"));
    m.def(
        "divergence_exact",
        [](const std::vector<double> &grad_sq, double gamma_th, double rho, double p_max, double sigma2,
           double g_bound, double d_max_alpha, std::size_t d_model) {
            return analysis::divergence_exact(grad_sq, grad_sq.size(), gamma_th, rho,
                                              make_power(p_max, sigma2, g_bound, d_max_alpha), d_model);
        },
        py::arg("grad_sq"), py::arg("gamma_th"), py::arg("rho"), py::arg("p_max"), py::arg("sigma2"),
        py::arg("g_bound"), py::arg("d_max_alpha"), py::arg("d_model") = 1);

    m.def("objective_h", [](double x, double k1, double k2) { return optimizer::objective_h(x, {k1, k2}); },
          py::arg("x"), py::arg("k1"), py::arg("k2"));
    m.def("derivative_h", [](double x, double k1, double k2) { return optimizer::derivative_h(x, {k1, k2}); },
          py::arg("x"), py::arg("k1"), py::arg("k2"));
    m.def(
        "second_derivative_h", [](double x, double k1, double k2) { return optimizer::second_derivative_h(x, {k1, k2}); },
        py::arg("x"), py::arg("k1"), py::arg("k2"));
    m.def(
        "optimal_threshold",
        [](double k1, double k2, const std::string &mode, std::optional<double> fixed_gamma) {
            optimizer::SolverOptions opts;
            opts.fixed_gamma = fixed_gamma;
            const auto s = optimizer::optimal_threshold({k1, k2}, optimizer::parse_threshold_mode(mode), opts);
            py::dict d;
            d["gamma_star"] = s.gamma_star;
            d["h_value"] = s.h_value;
            d["derivative_residual"] = s.derivative_residual;
            d["iterations"] = s.iterations;
            return d;
        },
        py::arg("k1"), py::arg("k2"), py::arg("mode") = "joint", py::arg("fixed_gamma") = py::none());

    m.def(
        "mc_xi_moments",
        [](double rho, double gamma_th, std::size_t n, std::uint64_t seed, std::size_t workers) {
            harness::XiMoments r;
            {
                py::gil_scoped_release release;
                r = harness::mc_xi_moments(rho, gamma_th, n, seed, workers);
            }
            py::dict d;
            d["mean"] = r.mean;
            d["variance"] = r.variance;
            d["se_mean"] = r.se_mean;
            d["se_var"] = r.se_var;
            d["n"] = r.n;
            return d;
        },
        py::arg("rho"), py::arg("gamma_th"), py::arg("n_samples"), py::arg("seed") = 1, py::arg("workers") = 1);

    m.def("command_names", &harness::command_names);
    m.def(
        "run_command",
        [](const std::string &command, const std::map<std::string, py::object> &config) {
            SystemConfig cfg = make_config(config);
            bool passed = true;
            report::SweepResult r;
            {
                py::gil_scoped_release release;
                r = harness::run_command(command, cfg, &passed);
            }
            py::dict d = table_to_dict(r);
            d["checks_passed"] = passed;
            d["config"] = to_key_values(cfg);
            return d;
        },
        py::arg("command"), py::arg("config") = std::map<std::string, py::object>{},
        "Run one experiment; config keys are those of the key-value config file.");
}
