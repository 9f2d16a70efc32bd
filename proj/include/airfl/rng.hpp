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

#ifndef AIRFL_RNG_HPP
#define AIRFL_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace airfl
{

/// Reproducible random stream keyed by (seed, stream_id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of seed and stream_id; both are fully specified by the C++
/// standard. Uniform variates use the top 53 bits of each draw. Normal
/// variates come from the Box-Muller transform, consumed in pairs (cos branch
/// first, sin branch cached). The resulting sequences are therefore identical
/// across standard library implementations up to libm rounding of log/cos/sin.
class RngStream
{
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform();
    // Uniform on (0, 1].
    double uniform_open_left();
    // Uniform integer on [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);
    double normal();
    // Circularly-symmetric CN(0, 1): two N(0, 1) scaled by 1/sqrt(2).
    std::complex<double> complex_normal();

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

// Stream-id layout shared by the training loop and the experiment harness:
// the top byte tags the purpose, the rest carries indices.
enum class StreamTag : std::uint64_t
{
    distances = 1,
    data = 2,
    batch = 3,
    channel = 4,
    noise = 5,
    trial = 6,
    init = 7,
};

inline std::uint64_t stream_id(StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0)
{
    return (static_cast<std::uint64_t>(tag) << 56) | ((a & 0xFFFFFFFFull) << 20) | (b & 0xFFFFFull);
}

} // namespace airfl

#endif
