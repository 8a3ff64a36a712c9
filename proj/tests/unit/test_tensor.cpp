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

#include "ueba/tensor.hpp"

#include <limits>

#include <doctest.h>

using namespace ueba;

TEST_SUITE("tensor") {

TEST_CASE("Matrix is row-major") {
    Matrix m(2, 3);
    m.at(0, 0) = 1;
    m.at(0, 2) = 2;
    m.at(1, 0) = 3;
    CHECK(m.data[0] == 1);
    CHECK(m.data[2] == 2);
    CHECK(m.data[3] == 3);
    CHECK(m.size() == 6);
    CHECK(m.same_shape(Matrix(2, 3)));
    CHECK_FALSE(m.same_shape(Matrix(3, 2)));
}

TEST_CASE("Tensor4 layout is (n, c, h, w) row-major") {
    Tensor4 t(2, 3, 4, 5);
    t.at(1, 2, 3, 4) = 42.0;
    const std::size_t idx = ((1 * 3 + 2) * 4u + 3) * 5u + 4;
    CHECK(t.data[idx] == 42.0);
    CHECK(t.size() == 2u * 3 * 4 * 5);
    CHECK(t.sample_size() == 3u * 4 * 5);
    CHECK(t.sample(1) == t.data.data() + t.sample_size());
    CHECK(t.shape_str() == "(2,3,4,5)");
}

TEST_CASE("gemm computes a hand fixture") {
    // A (2x3) * B (3x2).
    const double a[] = {1, 2, 3,
                        4, 5, 6};
    const double b[] = {7, 8,
                        9, 10,
                        11, 12};
    double c[4] = {0, 0, 0, 0};
    gemm(a, b, c, 2, 3, 2);
    CHECK(c[0] == 58.0);   // 1*7 + 2*9 + 3*11
    CHECK(c[1] == 64.0);   // 1*8 + 2*10 + 3*12
    CHECK(c[2] == 139.0);  // 4*7 + 5*9 + 6*11
    CHECK(c[3] == 154.0);
}

TEST_CASE("gemm_accumulate adds on top of existing values") {
    const double a[] = {2};
    const double b[] = {3};
    double c[1] = {10};
    gemm_accumulate(a, b, c, 1, 1, 1);
    CHECK(c[0] == 16.0);
    gemm(a, b, c, 1, 1, 1);  // plain gemm zeroes first
    CHECK(c[0] == 6.0);
}

TEST_CASE("all_finite flags inf and nan") {
    double v[] = {1.0, -2.0, 0.0};
    CHECK(all_finite(v, 3));
    v[1] = std::numeric_limits<double>::infinity();
    CHECK_FALSE(all_finite(v, 3));
    v[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(all_finite(v, 3));
    CHECK(all_finite(v, 1));  // prefix before the nan is fine
}

}  // TEST_SUITE
