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

#include "airfl/idx.hpp"
#include "airfl/error.hpp"

#include <zlib.h>

namespace airfl::idx
{

namespace
{
std::vector<std::uint8_t> slurp(const std::string &path)
{
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f)
        throw io_error("idx: cannot open " + path);
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0)
        out.insert(out.end(), buf, buf + n);
    const bool failed = n < 0;
    gzclose(f);
    if (failed)
        throw io_error("idx: read error in " + path);
    return out;
}

std::uint32_t be32(const std::vector<std::uint8_t> &b, std::size_t off)
{
    if (off + 4 > b.size())
        throw io_error("idx: truncated header");
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) | (std::uint32_t(b[off + 2]) << 8) |
           std::uint32_t(b[off + 3]);
}
} // namespace

Images parse_images(const std::vector<std::uint8_t> &bytes)
{
    if (be32(bytes, 0) != 2051)
        throw io_error("idx: bad image magic number");
    const std::size_t n = be32(bytes, 4);
    Images img;
    img.rows = be32(bytes, 8);
    img.cols = be32(bytes, 12);
    const std::size_t stride = img.rows * img.cols;
    if (bytes.size() < 16 + n * stride)
        throw io_error("idx: truncated image payload");
    img.pixels.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        auto first = bytes.begin() + static_cast<std::ptrdiff_t>(16 + i * stride);
        img.pixels.emplace_back(first, first + static_cast<std::ptrdiff_t>(stride));
    }
    return img;
}

std::vector<std::uint8_t> parse_labels(const std::vector<std::uint8_t> &bytes)
{
    if (be32(bytes, 0) != 2049)
        throw io_error("idx: bad label magic number");
    const std::size_t n = be32(bytes, 4);
    if (bytes.size() < 8 + n)
        throw io_error("idx: truncated label payload");
    return {bytes.begin() + 8, bytes.begin() + static_cast<std::ptrdiff_t>(8 + n)};
}

Images read_images(const std::string &path)
{
    return parse_images(slurp(path));
}

std::vector<std::uint8_t> read_labels(const std::string &path)
{
    return parse_labels(slurp(path));
}

} // namespace airfl::idx
