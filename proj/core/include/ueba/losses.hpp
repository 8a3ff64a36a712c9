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

#include "ueba/tensor.hpp"

#include <utility>
#include <vector>

namespace ueba {

/// Weights of the composite training objective
///   L = L_mask + lambda_value * L_value + lambda_temp * L_temp.
/// pos_weight <= 0 means "derive from the training set's inactive/active cell
/// ratio" (capped at 50) before training starts.
struct LossConfig {
    double pos_weight = 0.0;
    double lambda_value = 0.1;
    double lambda_temp = 0.0;  // off by default; 0.01 is the documented enabled setting

    static constexpr double kPosWeightCap = 50.0;
};

struct LossResult {
    double loss = 0.0;
    Matrix grad;  // d loss / d first-argument
};

/// Mean over cells of the weighted binary cross-entropy on logits:
///   -[pw*y*log(sigma(x)) + (1-y)*log(1 - sigma(x))]
/// evaluated in the stable form
///   (1-y)*x + (1 + (pw-1)*y) * (max(-x, 0) + log1p(exp(-|x|))).
/// Targets must be exactly 0 or 1.
LossResult bce_with_logits(const Matrix& logits, const Matrix& targets, double pos_weight);

/// (1/|Omega|) * sum over active cells of (pred - target)^2 where
/// Omega = {cells with mask == 1}. Empty Omega yields loss 0 and zero
/// gradient so fully inactive windows stay finite.
LossResult masked_mse(const Matrix& pred, const Matrix& target, const Matrix& mask);

/// Plain mean squared error over all cells (the single-channel baseline).
LossResult full_mse(const Matrix& pred, const Matrix& target);

struct TemporalResult {
    double loss = 0.0;
    // One (d_first, d_second) gradient pair per input latent pair.
    std::vector<std::pair<std::vector<double>, std::vector<double>>> grads;
};

/// Mean squared Euclidean distance between consecutive same-user latents.
/// Empty input yields loss 0.
TemporalResult temporal_consistency(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& latent_pairs);

}  // namespace ueba
