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

#ifndef AIRFL_IDX_HPP
#define AIRFL_IDX_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace airfl::idx
{

// IDX image file (magic 2051): n images of rows x cols unsigned bytes.
struct Images
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<std::uint8_t>> pixels;
};

// Raw or gzip-compressed input; gzip is detected from the stream.
Images read_images(const std::string &path);
// IDX label file (magic 2049).
std::vector<std::uint8_t> read_labels(const std::string &path);

// Parsers over an in-memory (already decompressed) buffer.
Images parse_images(const std::vector<std::uint8_t> &bytes);
std::vector<std::uint8_t> parse_labels(const std::vector<std::uint8_t> &bytes);

} // namespace airfl::idx

#endif
