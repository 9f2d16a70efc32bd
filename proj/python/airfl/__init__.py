# SPDX-License-Identifier: Apache-2.0
#
# airfl: over-the-air federated learning under imperfect CSI
# Copyright (C) 2026 The airfl authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
"""Over-the-air federated learning under imperfect CSI."""

from ._airfl import (  # noqa: F401
    DegenerateConfig,
    DomainError,
    UsageError,
    command_names,
    compensation_lambda,
    conditional_second_moment,
    dbm_to_watts,
    derivative_h,
    divergence_bound,
    divergence_exact,
    erf,
    erfc,
    exp_integral_ei,
    joint_cdf_xy,
    joint_pdf_xy,
    mc_xi_moments,
    objective_h,
    optimal_threshold,
    run_command,
    second_derivative_h,
    xi_variance,
)

__version__ = "0.1.0"
