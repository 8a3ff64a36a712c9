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

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ueba {

/// Bad CLI usage, unreadable config, missing input file. Exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A pipeline-stage contract was violated (e.g. malicious window reached the
/// training set, negative feature value). Exit code 2.
class DataContractError : public std::runtime_error {
public:
    explicit DataContractError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values or shape mismatches inside numeric code. Exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shortest round-trippable decimal rendering of a double. Used everywhere a
/// floating-point value is written to CSV or JSON so output bytes are stable.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace ueba
