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

#include "ueba/model.hpp"
#include "ueba/windowing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ueba {

enum class ScoreVariant { kAuto, kMask, kValue, kCombined };

const char* score_variant_name(ScoreVariant v);
ScoreVariant score_variant_from_name(const std::string& name);

/// kAuto picks the variant the training mode is designed around: combined for
/// mask_value, mask for mask_only, value for value_only and standard_ae.
ScoreVariant resolve_variant(ScoreVariant v, TrainMode mode);

struct ScoreConfig {
    double combine_alpha = 0.1;  // s_combined = s_mask + alpha * s_value
    ScoreVariant variant = ScoreVariant::kAuto;
    // Scoring-time BCE weight. 1 keeps s_mask a plain mean BCE regardless of
    // the training-time class balance; the weighted alternative is opt-in.
    double score_pos_weight = 1.0;

    void validate() const;
};

struct AnomalyScoreRecord {
    std::string user;
    std::int64_t window_start = 0;
    double s_mask = 0.0;
    double s_value = 0.0;
    double s_combined = 0.0;
    bool malicious = false;
    int scenario = 0;
};

double selected_score(const AnomalyScoreRecord& r, ScoreVariant resolved);

/// Scores one raw window; the value channel is normalized internally with the
/// model's own stats. s_mask is the mean BCE of the mask head, s_value the
/// masked MSE of the value head (full-cell MSE for standard_ae).
AnomalyScoreRecord score_window(const ModelParameters& m, const WindowSample& s,
                                const ScoreConfig& cfg);

/// One record per sample, sorted by (user, window_start).
std::vector<AnomalyScoreRecord> score_corpus(const ModelParameters& m,
                                             const std::vector<WindowSample>& samples,
                                             const ScoreConfig& cfg);

void write_scores_csv(const std::vector<AnomalyScoreRecord>& records, const std::string& path);

/// Inverse of write_scores_csv; used to re-check reports against emitted CSVs.
std::vector<AnomalyScoreRecord> read_scores_csv(const std::string& path);

}  // namespace ueba
