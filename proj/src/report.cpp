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

#include "airfl/report.hpp"
#include "airfl/error.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace airfl::report
{

void SweepResult::validate() const
{
    if (rows.empty())
        throw usage_error("report '" + name + "': no rows");
    for (const auto &r : rows)
        if (r.values.size() != columns.size())
            throw usage_error("report '" + name + "': row '" + r.label + "' has the wrong number of values");
    for (const auto &c : columns)
    {
        if (c.size() > 3 && c.compare(c.size() - 3, 3, "_mc") == 0)
        {
            const std::string se = c.substr(0, c.size() - 3) + "_se";
            bool found = false;
            for (const auto &d : columns)
                found = found || d == se;
            if (!found)
                throw usage_error("report '" + name + "': estimate column '" + c + "' lacks '" + se + "'");
        }
    }
}

std::string to_csv(const SweepResult &r)
{
    std::string out = "label";
    for (const auto &c : r.columns)
        out += "," + c;
    out += "\n";
    char buf[64];
    for (const auto &row : r.rows)
    {
        out += row.label;
        for (double v : row.values)
        {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

SweepResult parse_csv(const std::string &name, const std::string &text)
{
    SweepResult r;
    r.name = name;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line))
        throw usage_error("parse_csv: empty input");
    {
        std::stringstream hs(line);
        std::string cell;
        std::getline(hs, cell, ',');
        if (cell != "label")
            throw usage_error("parse_csv: first column must be 'label'");
        while (std::getline(hs, cell, ','))
            r.columns.push_back(cell);
    }
    while (std::getline(ss, line))
    {
        if (line.empty())
            continue;
        std::stringstream ls(line);
        SweepRow row;
        std::getline(ls, row.label, ',');
        std::string cell;
        while (std::getline(ls, cell, ','))
            row.values.push_back(std::strtod(cell.c_str(), nullptr));
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string content_hash(const std::string &content)
{
    const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("content_hash: SHA-1 failed");
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

const std::vector<std::string> &manifest_metadata_keys()
{
    static const std::vector<std::string> keys{"command", "format", "csv_sha1"};
    return keys;
}

namespace
{
void write_file(const std::filesystem::path &p, const std::string &content)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw io_error("cannot write " + p.string());
    out << content;
    if (!out)
        throw io_error("write failed for " + p.string());
}
} // namespace

WrittenFiles write_report(const SweepResult &r, const std::string &out_dir, const std::string &command,
                          const SystemConfig &cfg, const std::string &format)
{
    r.validate();
    if (format != "csv")
        throw usage_error("write_report: unsupported format '" + format + "'");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw io_error("cannot create output directory " + out_dir + ": " + ec.message());

    const std::string csv = to_csv(r);
    WrittenFiles files;
    files.csv_hash = content_hash(csv);
    files.csv_path = (std::filesystem::path(out_dir) / (r.name + ".csv")).string();
    files.manifest_path = (std::filesystem::path(out_dir) / (r.name + ".manifest")).string();

    KeyValues kv = to_key_values(cfg);
    kv["command"] = command;
    kv["format"] = format;
    kv["csv_sha1"] = files.csv_hash;

    write_file(files.csv_path, csv);
    write_file(files.manifest_path, "# airfl run manifest\n" + format_key_values(kv));
    return files;
}

} // namespace airfl::report
