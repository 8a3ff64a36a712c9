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

#include "ueba/losses.hpp"

#include "ueba/common.hpp"

#include <cmath>
#include <cstddef>

namespace ueba {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw NumericError(std::string(what) + ": shape mismatch");
    }
}

double sigmoid(double x) {
    // Evaluate via the non-overflowing branch for either sign.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

LossResult bce_with_logits(const Matrix& logits, const Matrix& targets, double pos_weight) {
    require_same_shape(logits, targets, "bce_with_logits");
    if (!(pos_weight > 0.0) || !std::isfinite(pos_weight)) {
        throw NumericError("bce_with_logits: pos_weight must be finite and positive");
    }
    const std::size_t n = logits.data.size();
    LossResult out;
    out.grad = Matrix(logits.rows, logits.cols);
    if (n == 0) return out;

    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = logits.data[i];
        const double y = targets.data[i];
        if (y != 0.0 && y != 1.0) {
            throw NumericError("bce_with_logits: targets must be exactly 0 or 1");
        }
        const double w = 1.0 + (pos_weight - 1.0) * y;
        // softplus(-x) = max(-x, 0) + log1p(exp(-|x|)), exact for either sign.
        const double softplus_neg = std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x)));
        total += (1.0 - y) * x + w * softplus_neg;

        const double s = sigmoid(x);
        out.grad.data[i] = (s * (1.0 - y) - pos_weight * y * (1.0 - s)) * inv_n;
    }
    out.loss = total * inv_n;
    if (!std::isfinite(out.loss)) {
        throw NumericError("bce_with_logits: non-finite loss");
    }
    return out;
}

LossResult masked_mse(const Matrix& pred, const Matrix& target, const Matrix& mask) {
    require_same_shape(pred, target, "masked_mse");
    require_same_shape(pred, mask, "masked_mse");
    LossResult out;
    out.grad = Matrix(pred.rows, pred.cols);

    std::size_t active = 0;
    for (double m : mask.data) {
        if (m != 0.0 && m != 1.0) {
            throw NumericError("masked_mse: mask must be exactly 0 or 1");
        }
        if (m == 1.0) ++active;
    }
    if (active == 0) return out;

    const double inv = 1.0 / static_cast<double>(active);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        if (mask.data[i] != 1.0) continue;
        const double d = pred.data[i] - target.data[i];
        total += d * d;
        out.grad.data[i] = 2.0 * d * inv;
    }
    out.loss = total * inv;
    if (!std::isfinite(out.loss)) {
        throw NumericError("masked_mse: non-finite loss");
    }
    return out;
}

LossResult full_mse(const Matrix& pred, const Matrix& target) {
    require_same_shape(pred, target, "full_mse");
    const std::size_t n = pred.data.size();
    LossResult out;
    out.grad = Matrix(pred.rows, pred.cols);
    if (n == 0) return out;

    const double inv = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pred.data[i] - target.data[i];
        total += d * d;
        out.grad.data[i] = 2.0 * d * inv;
    }
    out.loss = total * inv;
    if (!std::isfinite(out.loss)) {
        throw NumericError("full_mse: non-finite loss");
    }
    return out;
}

TemporalResult temporal_consistency(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& latent_pairs) {
    TemporalResult out;
    if (latent_pairs.empty()) return out;

    const double inv_p = 1.0 / static_cast<double>(latent_pairs.size());
    double total = 0.0;
    out.grads.reserve(latent_pairs.size());
    for (const auto& [za, zb] : latent_pairs) {
        if (za.size() != zb.size()) {
            throw NumericError("temporal_consistency: latent dimension mismatch");
        }
        std::vector<double> ga(za.size(), 0.0);
        std::vector<double> gb(zb.size(), 0.0);
        for (std::size_t i = 0; i < za.size(); ++i) {
            const double d = zb[i] - za[i];
            total += d * d;
            // d/dza ||zb - za||^2 = -2(zb - za); symmetric for zb.
            ga[i] = -2.0 * d * inv_p;
            gb[i] = 2.0 * d * inv_p;
        }
        out.grads.emplace_back(std::move(ga), std::move(gb));
    }
    out.loss = total * inv_p;
    if (!std::isfinite(out.loss)) {
        throw NumericError("temporal_consistency: non-finite loss");
    }
    return out;
}

}  // namespace ueba
