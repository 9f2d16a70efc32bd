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

#ifndef AIRFL_SPECFUN_HPP
#define AIRFL_SPECFUN_HPP

namespace airfl::specfun
{

// Tolerance pair used by verification code comparing against reference values.
struct Accuracy
{
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;

    void validate() const;
    bool accepts(double value, double reference) const;
};

// Exponential integral Ei(x) = -PV int_{-x}^{inf} e^{-t}/t dt for real x != 0.
// Relative error below 1e-12 for |x| in [1e-6, 50] away from the positive root x = 0.3725...
double exp_integral_ei(double x);

double erf(double x);

// 1 - erf(x) evaluated directly, accurate in the far tail.
double erfc(double x);

// Unit step with heaviside(0) = 0.
double heaviside(double x);

} // namespace airfl::specfun

#endif
