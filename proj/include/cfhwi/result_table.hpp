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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace cfhwi {

/// Numeric table with a JSON metadata block, written as CSV:
///
///     # {"experiment": "...", "config_hash": "...", "seed": 1, ...}
///     col_a,col_b,...
///     1.5,2,...
///
/// Values are printed with 17 significant digits so a parse of the emitted text
/// reproduces every double exactly.
struct ResultTable {
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::string experiment() const;
    [[nodiscard]] std::size_t column(const std::string& name) const;  // throws if absent
    void add_row(std::vector<double> row);

    bool operator==(const ResultTable& other) const;
};

void write_csv(std::ostream& out, const ResultTable& table);
std::string to_csv(const ResultTable& table);
void save_csv(const std::filesystem::path& path, const ResultTable& table);

ResultTable parse_csv(std::istream& in);
ResultTable parse_csv(const std::string& text);
ResultTable load_csv(const std::filesystem::path& path);

}  // namespace cfhwi
