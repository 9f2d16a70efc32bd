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

#include "airfl/specfun.hpp"
#include "airfl/error.hpp"

#include <cmath>

namespace airfl::specfun
{

void Accuracy::validate() const
{
    detail::require(rel_tol > 0.0 && abs_tol > 0.0, "Accuracy: tolerances must be positive");
}

bool Accuracy::accepts(double value, double reference) const
{
    const double err = std::fabs(value - reference);
    return err <= abs_tol || err <= rel_tol * std::fabs(reference);
}

// libstdc++ evaluates Ei with a series / continued-fraction / asymptotic split
// (std::expint); accuracy is pinned by the high-precision oracle in the tests.
double exp_integral_ei(double x)
{
    if (!std::isfinite(x))
        throw domain_error("exp_integral_ei: argument must be finite");
    if (x == 0.0)
        throw domain_error("exp_integral_ei: logarithmic singularity at x = 0");
    return std::expint(x);
}

double erf(double x)
{
    if (!std::isfinite(x))
        throw domain_error("erf: argument must be finite");
    return std::erf(x);
}

double erfc(double x)
{
    if (!std::isfinite(x))
        throw domain_error("erfc: argument must be finite");
    return std::erfc(x);
}

double heaviside(double x)
{
    return x > 0.0 ? 1.0 : 0.0;
}

} // namespace airfl::specfun
