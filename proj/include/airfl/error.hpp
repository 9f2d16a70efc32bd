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

#ifndef AIRFL_ERROR_HPP
#define AIRFL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace airfl
{

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Caller misuse: mismatched dimensions, empty inputs, bad flags.
class usage_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Configuration that is individually valid but admits no meaningful result.
class degenerate_config : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{
inline void require(bool cond, const std::string &what)
{
    if (!cond)
        throw airfl::domain_error(what);
}
} // namespace detail

} // namespace airfl

#endif
