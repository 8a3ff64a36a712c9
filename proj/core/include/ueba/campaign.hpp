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

#include "ueba/scoring.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ueba {

struct SequenceConfig {
    int sequence_len = 6;  // L windows (days at W=24)
    int stride = 3;
    std::vector<int> topk = {2, 3};
    // Which per-window score the aggregates consume; mask is the default the
    // campaign tables are built on.
    ScoreVariant variant = ScoreVariant::kMask;

    void validate() const;
};

struct SequenceRecord {
    std::string user;
    int start_index = 0;           // window index within the user's series
    std::int64_t start_ts = 0;     // first member's window_start
    std::vector<double> member_scores;  // length L
    bool malicious = false;        // any-overlap over members
    int scenario = 0;
    std::vector<std::pair<std::string, double>> aggregates;  // (name, score)
};

struct SequenceExtraction {
    std::vector<SequenceRecord> sequences;  // ordered by (user, start_index)
    std::vector<std::string> warnings;      // users with fewer than L windows
};

/// Sliding windows of L member scores at the configured stride per user;
/// sequences never span users and partial tails are dropped. Start indices
/// are exactly {i : i == 0 (mod stride), i + L <= N_u}.
SequenceExtraction extract_sequences(const std::vector<AnomalyScoreRecord>& records,
                                     const SequenceConfig& cfg, TrainMode mode);

/// Arithmetic sum of all member scores.
double aggregate_sum(const std::vector<double>& scores);

/// Sum of the k largest member scores; k >= L degenerates to the full sum.
double aggregate_topk(const std::vector<double>& scores, int k);

struct Aggregator {
    std::string name;
    int k = 0;  // 0 means sum
};

/// "sum" plus one "topK" entry per configured k.
std::vector<Aggregator> default_aggregators(const SequenceConfig& cfg);

void score_sequences(std::vector<SequenceRecord>& sequences,
                     const std::vector<Aggregator>& aggregators);

/// Long-format rows: user,start,label,scenario,agg_name,agg_score.
void write_sequences_csv(const std::vector<SequenceRecord>& sequences, const std::string& path);

}  // namespace ueba
