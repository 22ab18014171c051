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

#include "marsseg/report/csv.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "marsseg/common.hpp"

namespace marsseg::report {

namespace {

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote_cell(const std::string& cell) {
    if (!needs_quoting(cell)) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

double parse_double(const std::string& cell, const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw DataError(fmt::format("bad {} value in CSV: '{}'", what, cell));
    return value;
}

uint64_t parse_u64(const std::string& cell, const char* what) {
    uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw DataError(fmt::format("bad {} value in CSV: '{}'", what, cell));
    return value;
}

}  // namespace

std::string format_csv(const Csv& csv) {
    std::string out;
    for (const auto& c : csv.comments) out += fmt::format("# {}\n", c);
    for (size_t i = 0; i < csv.header.size(); ++i) {
        if (i > 0) out += ',';
        out += quote_cell(csv.header[i]);
    }
    out += '\n';
    for (const auto& row : csv.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += quote_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const Csv& csv) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot open {} for writing", path.string()));
    const std::string text = format_csv(csv);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw DataError(fmt::format("failed writing {}", path.string()));
}

Csv parse_csv(const std::string& text) {
    Csv csv;
    size_t pos = 0;
    bool seen_header = false;
    while (pos < text.size()) {
        // A record ends at the first newline outside quotes; quoted cells may
        // span lines. Doubled quotes toggle the state twice, a no-op.
        size_t end = pos;
        bool quoted = false;
        while (end < text.size()) {
            const char c = text[end];
            if (c == '"') quoted = !quoted;
            if (c == '\n' && !quoted) break;
            ++end;
        }
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            size_t start = 1;
            while (start < line.size() && line[start] == ' ') ++start;
            csv.comments.push_back(line.substr(start));
            continue;
        }
        if (!seen_header) {
            csv.header = split_row(line);
            seen_header = true;
        } else {
            csv.rows.push_back(split_row(line));
        }
    }
    return csv;
}

Csv read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot open {}", path.string()));
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_csv(text);
}

void append_csv_row(const std::filesystem::path& path, const std::vector<std::string>& row) {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    if (!f) throw DataError(fmt::format("cannot open {} for appending", path.string()));
    std::string line;
    for (size_t i = 0; i < row.size(); ++i) {
        if (i > 0) line += ',';
        line += quote_cell(row[i]);
    }
    line += '\n';
    f.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!f) throw DataError(fmt::format("failed appending to {}", path.string()));
}

std::string format_number(double v) { return fmt::format("{}", v); }

std::vector<std::string> sweep_csv_header() {
    std::vector<std::string> h{"fraction", "seed", "init_mode", "accuracy"};
    for (int c = 0; c < data::kNumClasses; ++c) h.push_back(fmt::format("recall_{}", c));
    h.emplace_back("epochs");
    return h;
}

std::vector<std::string> sweep_record_row(const eval::SweepRecord& rec) {
    std::vector<std::string> row{format_number(rec.fraction), fmt::format("{}", rec.seed),
                                 rec.init_mode, format_number(rec.accuracy)};
    for (const auto& r : rec.recall) row.push_back(r ? format_number(*r) : "n/a");
    row.push_back(fmt::format("{}", rec.epochs));
    return row;
}

std::vector<eval::SweepRecord> parse_sweep_rows(const Csv& csv) {
    const auto expected = sweep_csv_header();
    if (csv.header != expected)
        throw DataError(fmt::format("unexpected sweep.csv header: '{}'",
                                    fmt::join(csv.header, ",")));
    std::vector<eval::SweepRecord> records;
    for (const auto& row : csv.rows) {
        if (row.size() != expected.size())
            throw DataError(fmt::format("sweep.csv row has {} cells, expected {}", row.size(),
                                        expected.size()));
        eval::SweepRecord rec;
        rec.fraction = parse_double(row[0], "fraction");
        rec.seed = parse_u64(row[1], "seed");
        rec.init_mode = row[2];
        rec.accuracy = parse_double(row[3], "accuracy");
        for (int c = 0; c < data::kNumClasses; ++c) {
            const std::string& cell = row[4 + static_cast<size_t>(c)];
            if (cell != "n/a") rec.recall[static_cast<size_t>(c)] = parse_double(cell, "recall");
        }
        rec.epochs = static_cast<int>(parse_u64(row[10], "epochs"));
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace marsseg::report
