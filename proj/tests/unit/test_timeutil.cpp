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

#include <doctest.h>

using namespace ueba;

TEST_SUITE("timeutil") {

TEST_CASE("civil date anchors") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(1970, 1, 2) == 1);
    CHECK(days_from_civil(1969, 12, 31) == -1);
    // 40 years after the epoch: 40 * 365 + 10 leap days, plus 3 days into
    // January.
    CHECK(days_from_civil(2010, 1, 1) == 14610);
    CHECK(days_from_civil(2010, 1, 4) == 14613);
    CHECK(days_from_civil(2000, 2, 29) == 11016);  // century leap year
    CHECK(days_from_civil(2000, 3, 1) == 11017);
}

TEST_CASE("civil_from_days inverts days_from_civil") {
    for (std::int64_t d = -80000; d <= 80000; d += 37) {
        int y, m, day;
        civil_from_days(d, y, m, day);
        CHECK(days_from_civil(y, m, day) == d);
        CHECK(m >= 1);
        CHECK(m <= 12);
        CHECK(day >= 1);
        CHECK(day <= 31);
    }
}

TEST_CASE("make_timestamp composes day and time parts") {
    CHECK(make_timestamp(1970, 1, 1, 0, 0, 0) == 0);
    CHECK(make_timestamp(1970, 1, 1, 0, 0, 1) == 1);
    CHECK(make_timestamp(2010, 1, 4, 0, 0, 0) == 14613 * kSecondsPerDay);
    CHECK(make_timestamp(2010, 1, 4, 13, 30, 5) ==
          14613 * kSecondsPerDay + 13 * 3600 + 30 * 60 + 5);
}

TEST_CASE("floor_to_day and hour_of_day") {
    const std::int64_t noon = make_timestamp(2010, 1, 4, 12, 0, 0);
    CHECK(floor_to_day(noon) == make_timestamp(2010, 1, 4, 0, 0, 0));
    CHECK(hour_of_day(noon) == 12);
    CHECK(hour_of_day(make_timestamp(2010, 1, 4, 0, 0, 0)) == 0);
    CHECK(hour_of_day(make_timestamp(2010, 1, 4, 23, 59, 59)) == 23);
    // Negative timestamps floor toward minus infinity, not toward zero.
    CHECK(floor_to_day(-1) == -kSecondsPerDay);
    CHECK(hour_of_day(-1) == 23);
}

TEST_CASE("parse_timestamp round trip on the default format") {
    const std::int64_t ts = make_timestamp(2010, 3, 17, 9, 5, 59);
    const std::string text = format_timestamp(ts, kDefaultTimestampFormat);
    CHECK(text == "03/17/2010 09:05:59");
    const auto parsed = parse_timestamp(text, kDefaultTimestampFormat);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == ts);
}

TEST_CASE("parse_timestamp rejects malformed input") {
    const std::string& f = kDefaultTimestampFormat;
    CHECK_FALSE(parse_timestamp("", f).has_value());
    CHECK_FALSE(parse_timestamp("01/01/2010", f).has_value());          // truncated
    CHECK_FALSE(parse_timestamp("1/01/2010 00:00:00", f).has_value());  // 1-digit month
    CHECK_FALSE(parse_timestamp("13/01/2010 00:00:00", f).has_value()); // month 13
    CHECK_FALSE(parse_timestamp("01/32/2010 00:00:00", f).has_value()); // day 32
    CHECK_FALSE(parse_timestamp("01/01/2010 24:00:00", f).has_value()); // hour 24
    CHECK_FALSE(parse_timestamp("01/01/2010 00:60:00", f).has_value()); // minute 60
    CHECK_FALSE(parse_timestamp("01-01-2010 00:00:00", f).has_value()); // wrong separator
    CHECK_FALSE(parse_timestamp("01/01/2010 00:00:00x", f).has_value()); // trailing junk
    CHECK_FALSE(parse_timestamp("0a/01/2010 00:00:00", f).has_value()); // non-digit
}

TEST_CASE("format subset handles literals and escaped percent") {
    CHECK(format_timestamp(0, "%Y-%m-%d") == "1970-01-01");
    CHECK(format_timestamp(0, "100%%") == "100%");
    const auto parsed = parse_timestamp("1970-01-01", "%Y-%m-%d");
    REQUIRE(parsed.has_value());
    CHECK(*parsed == 0);
    CHECK_FALSE(parse_timestamp("x", "%Q").has_value());  // unsupported directive
}

TEST_CASE("format_timestamp handles pre-epoch times") {
    CHECK(format_timestamp(-1, kDefaultTimestampFormat) == "12/31/1969 23:59:59");
}

}  // TEST_SUITE
