// cfhwi: cell-free massive MIMO uplink with transceiver hardware impairments
// Copyright (C) 2026 The cfhwi Authors
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

#include "cfhwi/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cfhwi/errors.hpp"

namespace cfhwi {

namespace {

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_value(const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) throw ConfigError("bad numeric cell '" + cell + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool same_value(double a, double b) {
    return a == b || (std::isnan(a) && std::isnan(b));
}

}  // namespace

std::string ResultTable::experiment() const {
    return metadata.value("experiment", std::string{});
}

std::size_t ResultTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw ConfigError("result table has no column '" + name + "'");
}

void ResultTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw ConsistencyError("row width does not match the column schema");
    rows.push_back(std::move(row));
}

bool ResultTable::operator==(const ResultTable& other) const {
    if (metadata != other.metadata || columns != other.columns || rows.size() != other.rows.size()) return false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != other.rows[r].size()) return false;
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (!same_value(rows[r][c], other.rows[r][c])) return false;
        }
    }
    return true;
}

void write_csv(std::ostream& out, const ResultTable& table) {
    out << "# " << table.metadata.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_value(row[i]);
        }
        out << '\n';
    }
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

void save_csv(const std::filesystem::path& path, const ResultTable& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, table);
}

ResultTable parse_csv(std::istream& in) {
    ResultTable table;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
        throw ConfigError("result CSV must start with a '# {json}' metadata line");
    }
    try {
        table.metadata = nlohmann::json::parse(line.substr(2));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad metadata block: ") + e.what());
    }
    if (!std::getline(in, line) || line.empty()) throw ConfigError("result CSV has no header row");
    table.columns = split_csv(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != table.columns.size()) throw ConfigError("row width does not match the header");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_value(c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

ResultTable load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    return parse_csv(in);
}

}  // namespace cfhwi
