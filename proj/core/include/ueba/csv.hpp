// Copyright (C) 2026 The UEBA Toolkit Authors. All rights reserved.
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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace ueba {

/// Minimal RFC-4180-ish CSV reader: header row, quoted fields with ""
/// escapes, no embedded newlines. Enough for CERT-style exports.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path);

    bool has_column(const std::string& name) const { return columns_.count(name) > 0; }

    /// Reads the next data row. Returns false at end of file.
    bool next_row();

    /// 1-based line number of the current row (header is line 1).
    std::size_t line_number() const { return line_; }

    /// Field by column name; empty string if the row is short.
    const std::string& field(const std::string& name) const;

    const std::vector<std::string>& header() const { return header_; }

private:
    std::ifstream in_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, std::size_t> columns_;
    std::vector<std::string> row_;
    std::size_t line_ = 1;
    std::string empty_;
};

/// Splits one CSV line honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a field if it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

/// Joins fields into one CSV line (no trailing newline).
std::string join_csv(const std::vector<std::string>& fields);

}  // namespace ueba
