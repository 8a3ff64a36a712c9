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

#include "ueba/csv.hpp"

#include "ueba/common.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace ueba;
using ueba::test::TempDir;
using ueba::test::write_text;

TEST_SUITE("csv") {

TEST_CASE("split_csv_line plain fields") {
    CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("") == std::vector<std::string>{""});
    CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
    CHECK(split_csv_line("a,b,") == std::vector<std::string>{"a", "b", ""});
}

TEST_CASE("split_csv_line quoted fields") {
    CHECK(split_csv_line("\"a,b\",c") == std::vector<std::string>{"a,b", "c"});
    CHECK(split_csv_line("\"say \"\"hi\"\"\",x") == std::vector<std::string>{"say \"hi\"", "x"});
    CHECK(split_csv_line("\"\",\"\"") == std::vector<std::string>{"", ""});
}

TEST_CASE("csv_escape quotes only when needed") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
    CHECK(csv_escape("") == "");
}

TEST_CASE("join then split is the identity") {
    const std::vector<std::string> fields = {"a", "b,c", "d\"e", "", "plain"};
    CHECK(split_csv_line(join_csv(fields)) == fields);
}

TEST_CASE("CsvReader reads header and rows by name") {
    TempDir dir("csv");
    const std::string path = dir.file("t.csv");
    write_text(path,
               "user,date,note\n"
               "U1,01/02/2010 08:00:00,\"hello, world\"\n"
               "U2,01/03/2010 09:00:00,plain\n");

    CsvReader r(path);
    CHECK(r.has_column("user"));
    CHECK(r.has_column("note"));
    CHECK_FALSE(r.has_column("missing"));
    CHECK(r.header() == std::vector<std::string>{"user", "date", "note"});

    REQUIRE(r.next_row());
    CHECK(r.line_number() == 2);
    CHECK(r.field("user") == "U1");
    CHECK(r.field("note") == "hello, world");

    REQUIRE(r.next_row());
    CHECK(r.line_number() == 3);
    CHECK(r.field("user") == "U2");

    CHECK_FALSE(r.next_row());
}

TEST_CASE("CsvReader returns empty for short rows and unknown columns") {
    TempDir dir("csv");
    const std::string path = dir.file("short.csv");
    write_text(path, "a,b,c\n1,2\n");
    CsvReader r(path);
    REQUIRE(r.next_row());
    CHECK(r.field("a") == "1");
    CHECK(r.field("c") == "");
    CHECK(r.field("nope") == "");
}

TEST_CASE("CsvReader skips blank lines") {
    TempDir dir("csv");
    const std::string path = dir.file("blank.csv");
    write_text(path, "a,b\n1,2\n\n3,4\n");
    CsvReader r(path);
    REQUIRE(r.next_row());
    CHECK(r.field("a") == "1");
    REQUIRE(r.next_row());
    CHECK(r.field("a") == "3");
    CHECK_FALSE(r.next_row());
}

TEST_CASE("missing file is a config error") {
    CHECK_THROWS_AS(CsvReader("/nonexistent/definitely_missing.csv"), ConfigError);
}

}  // TEST_SUITE
