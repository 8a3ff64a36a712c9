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

#include <cmath>
#include <cstring>

namespace ueba {

std::string Tensor4::shape_str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + ")";
}

void gemm_accumulate(const double* a, const double* b, double* c, int m, int k, int n) {
    // i-l-j ordering: the inner loop streams rows of B and C, which the
    // compiler vectorizes well.
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int l = 0; l < k; ++l) {
            const double av = arow[l];
            if (av == 0.0) continue;
            const double* brow = b + static_cast<std::size_t>(l) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm(const double* a, const double* b, double* c, int m, int k, int n) {
    std::memset(c, 0, static_cast<std::size_t>(m) * n * sizeof(double));
    gemm_accumulate(a, b, c, m, k, n);
}

bool all_finite(const double* p, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        if (!std::isfinite(p[i])) return false;
    }
    return true;
}

}  // namespace ueba
