// Copyright 2026 The marsseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "marsseg/eval/sweep.hpp"

namespace marsseg::report {

// Minimal CSV with leading `# key=value` comment lines (notably `# run=`),
// one header row, and string cells. Quoting follows RFC 4180 when a cell
// contains a comma, quote, or newline.
struct Csv {
    std::vector<std::string> comments;  // stored without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_csv(const Csv& csv);
void write_csv(const std::filesystem::path& path, const Csv& csv);
Csv parse_csv(const std::string& text);
Csv read_csv(const std::filesystem::path& path);
void append_csv_row(const std::filesystem::path& path, const std::vector<std::string>& row);

// Shortest decimal that parses back to the same double (fmt's default).
std::string format_number(double v);

// Sweep records <-> sweep.csv rows
// (fraction, seed, init_mode, accuracy, recall_0..recall_5, epochs).
std::vector<std::string> sweep_csv_header();
std::vector<std::string> sweep_record_row(const eval::SweepRecord& rec);
std::vector<eval::SweepRecord> parse_sweep_rows(const Csv& csv);

}  // namespace marsseg::report
