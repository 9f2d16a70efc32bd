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

#ifndef AIRFL_REPORT_HPP
#define AIRFL_REPORT_HPP

#include "airfl/config.hpp"

#include <string>
#include <vector>

namespace airfl::report
{

struct SweepRow
{
    std::string label;
    std::vector<double> values;
    bool operator==(const SweepRow &) const = default;
};

/// Plot-ready table. Column naming contract: every Monte-Carlo estimate column
/// "<name>_mc" is accompanied by its standard error column "<name>_se".
struct SweepResult
{
    std::string name;
    std::vector<std::string> columns; // value columns, after the leading "label"
    std::vector<SweepRow> rows;

    // Throws usage_error on empty results, ragged rows or a missing SE column.
    void validate() const;
    bool operator==(const SweepResult &) const = default;
};

std::string to_csv(const SweepResult &r);
SweepResult parse_csv(const std::string &name, const std::string &text);

// Git blob hash: SHA-1 over "blob <size>\0" followed by the content.
std::string content_hash(const std::string &content);

struct WrittenFiles
{
    std::string csv_path;
    std::string manifest_path;
    std::string csv_hash;
};

/// Writes <out_dir>/<name>.csv and <out_dir>/<name>.manifest. The manifest is
/// the resolved configuration plus the command and the CSV content hash; it is
/// itself a valid --config input. Nothing is written for invalid results.
WrittenFiles write_report(const SweepResult &r, const std::string &out_dir, const std::string &command,
                          const SystemConfig &cfg, const std::string &format = "csv");

// Manifest keys that are metadata rather than configuration.
const std::vector<std::string> &manifest_metadata_keys();

} // namespace airfl::report

#endif
