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

#include "ueba/timeutil.hpp"

#include <cstdio>

namespace ueba {

// Howard Hinnant's public-domain civil calendar algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    year = static_cast<int>(y + (month <= 2));
}

std::int64_t make_timestamp(int year, int month, int day, int hour, int minute, int second) {
    return days_from_civil(year, month, day) * kSecondsPerDay + hour * kSecondsPerHour +
           minute * 60 + second;
}

namespace {

bool read_fixed_int(const std::string& s, std::size_t& pos, int digits, int& out) {
    if (pos + digits > s.size()) return false;
    int v = 0;
    for (int i = 0; i < digits; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    pos += digits;
    out = v;
    return true;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(const std::string& text, const std::string& format) {
    std::size_t pos = 0;
    int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
    for (std::size_t fi = 0; fi < format.size(); ++fi) {
        char fc = format[fi];
        if (fc == '%' && fi + 1 < format.size()) {
            char spec = format[++fi];
            bool ok = true;
            switch (spec) {
                case 'Y': ok = read_fixed_int(text, pos, 4, year); break;
                case 'm': ok = read_fixed_int(text, pos, 2, month); break;
                case 'd': ok = read_fixed_int(text, pos, 2, day); break;
                case 'H': ok = read_fixed_int(text, pos, 2, hour); break;
                case 'M': ok = read_fixed_int(text, pos, 2, minute); break;
                case 'S': ok = read_fixed_int(text, pos, 2, second); break;
                case '%':
                    ok = pos < text.size() && text[pos] == '%';
                    ++pos;
                    break;
                default: return std::nullopt;  // unsupported directive
            }
            if (!ok) return std::nullopt;
        } else {
            if (pos >= text.size() || text[pos] != fc) return std::nullopt;
            ++pos;
        }
    }
    if (pos != text.size()) return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    return make_timestamp(year, month, day, hour, minute, second);
}

std::string format_timestamp(std::int64_t ts, const std::string& format) {
    std::int64_t days = ts / kSecondsPerDay;
    std::int64_t rem = ts % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    int year, month, day;
    civil_from_days(days, year, month, day);
    const int hour = static_cast<int>(rem / kSecondsPerHour);
    const int minute = static_cast<int>((rem % kSecondsPerHour) / 60);
    const int second = static_cast<int>(rem % 60);

    std::string out;
    char buf[8];
    for (std::size_t fi = 0; fi < format.size(); ++fi) {
        char fc = format[fi];
        if (fc == '%' && fi + 1 < format.size()) {
            char spec = format[++fi];
            switch (spec) {
                case 'Y': std::snprintf(buf, sizeof(buf), "%04d", year); out += buf; break;
                case 'm': std::snprintf(buf, sizeof(buf), "%02d", month); out += buf; break;
                case 'd': std::snprintf(buf, sizeof(buf), "%02d", day); out += buf; break;
                case 'H': std::snprintf(buf, sizeof(buf), "%02d", hour); out += buf; break;
                case 'M': std::snprintf(buf, sizeof(buf), "%02d", minute); out += buf; break;
                case 'S': std::snprintf(buf, sizeof(buf), "%02d", second); out += buf; break;
                case '%': out += '%'; break;
                default: out += '%'; out += spec; break;
            }
        } else {
            out += fc;
        }
    }
    return out;
}

}  // namespace ueba
