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

#include <cstdint>
#include <optional>
#include <string>

namespace ueba {

// All timestamps are UTC seconds since the Unix epoch. Conversions avoid the
// C library's timezone-dependent functions so results are identical on every
// host.

constexpr std::int64_t kSecondsPerHour = 3600;
constexpr std::int64_t kSecondsPerDay = 86400;

/// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, int month, int day);

/// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

std::int64_t make_timestamp(int year, int month, int day, int hour, int minute, int second);

/// Start of the UTC day containing `ts`.
inline std::int64_t floor_to_day(std::int64_t ts) {
    std::int64_t d = ts / kSecondsPerDay;
    if (ts < 0 && ts % kSecondsPerDay != 0) --d;
    return d * kSecondsPerDay;
}

/// Hour of day in [0, 24).
inline int hour_of_day(std::int64_t ts) {
    return static_cast<int>((ts - floor_to_day(ts)) / kSecondsPerHour);
}

/// Parse a timestamp using a strptime-style format (subset: %m %d %Y %H %M %S
/// and literal characters). Returns nullopt on malformed input.
std::optional<std::int64_t> parse_timestamp(const std::string& text, const std::string& format);

/// Format a timestamp with the same format subset accepted by parse_timestamp.
std::string format_timestamp(std::int64_t ts, const std::string& format);

/// The column layout used by CERT-style exports: "MM/DD/YYYY HH:MM:SS".
inline const std::string kDefaultTimestampFormat = "%m/%d/%Y %H:%M:%S";

}  // namespace ueba
