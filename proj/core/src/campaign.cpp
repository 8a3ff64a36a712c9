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

#include "ueba/campaign.hpp"

#include "ueba/common.hpp"
#include "ueba/csv.hpp"
#include "ueba/timeutil.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>

namespace ueba {

void SequenceConfig::validate() const {
    if (sequence_len < 1) throw ConfigError("sequence: sequence_len must be >= 1");
    if (stride < 1 || stride > sequence_len) {
        throw ConfigError("sequence: stride must satisfy 1 <= stride <= sequence_len");
    }
    for (int k : topk) {
        if (k < 1) throw ConfigError("sequence: top-k requires k >= 1");
    }
}

SequenceExtraction extract_sequences(const std::vector<AnomalyScoreRecord>& records,
                                     const SequenceConfig& cfg, TrainMode mode) {
    cfg.validate();
    const ScoreVariant variant = resolve_variant(cfg.variant, mode);

    std::map<std::string, std::vector<const AnomalyScoreRecord*>> by_user;
    for (const AnomalyScoreRecord& r : records) by_user[r.user].push_back(&r);

    SequenceExtraction out;
    for (auto& [user, rows] : by_user) {
        std::sort(rows.begin(), rows.end(),
                  [](const AnomalyScoreRecord* a, const AnomalyScoreRecord* b) {
                      return a->window_start < b->window_start;
                  });
        const int n = static_cast<int>(rows.size());
        if (n < cfg.sequence_len) {
            out.warnings.push_back("user '" + user + "' has " + std::to_string(n) +
                                   " windows, fewer than L=" +
                                   std::to_string(cfg.sequence_len) + "; no sequences");
            continue;
        }
        for (int i = 0; i + cfg.sequence_len <= n; i += cfg.stride) {
            SequenceRecord seq;
            seq.user = user;
            seq.start_index = i;
            seq.start_ts = rows[static_cast<std::size_t>(i)]->window_start;
            seq.member_scores.reserve(static_cast<std::size_t>(cfg.sequence_len));
            for (int j = i; j < i + cfg.sequence_len; ++j) {
                const AnomalyScoreRecord* r = rows[static_cast<std::size_t>(j)];
                seq.member_scores.push_back(selected_score(*r, variant));
                if (r->malicious && !seq.malicious) {
                    seq.malicious = true;
                    seq.scenario = r->scenario;
                }
            }
            out.sequences.push_back(std::move(seq));
        }
    }
    return out;
}

double aggregate_sum(const std::vector<double>& scores) {
    if (scores.empty()) throw DataContractError("aggregate_sum: empty score list");
    // Descending accumulation order makes the sum permutation-invariant bit
    // for bit and keeps top-k with k >= L exactly equal to the full sum.
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double sum = 0.0;
    for (double s : sorted) sum += s;
    return sum;
}

double aggregate_topk(const std::vector<double>& scores, int k) {
    if (scores.empty()) throw DataContractError("aggregate_topk: empty score list");
    if (k < 1) throw ConfigError("aggregate_topk: k must be >= 1");
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), sorted.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) sum += sorted[i];
    return sum;
}

std::vector<Aggregator> default_aggregators(const SequenceConfig& cfg) {
    std::vector<Aggregator> out;
    out.push_back({"sum", 0});
    for (int k : cfg.topk) out.push_back({"top" + std::to_string(k), k});
    return out;
}

void score_sequences(std::vector<SequenceRecord>& sequences,
                     const std::vector<Aggregator>& aggregators) {
    if (aggregators.empty()) throw ConfigError("score_sequences: no aggregators");
    for (SequenceRecord& seq : sequences) {
        seq.aggregates.clear();
        for (const Aggregator& agg : aggregators) {
            const double v = agg.k <= 0 ? aggregate_sum(seq.member_scores)
                                        : aggregate_topk(seq.member_scores, agg.k);
            seq.aggregates.emplace_back(agg.name, v);
        }
    }
}

void write_sequences_csv(const std::vector<SequenceRecord>& sequences,
                         const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write sequences csv '" + path + "'");
    out << "user,start,label,scenario,agg_name,agg_score\n";
    for (const SequenceRecord& seq : sequences) {
        for (const auto& [name, score] : seq.aggregates) {
            out << join_csv({seq.user, format_timestamp(seq.start_ts, kDefaultTimestampFormat),
                             seq.malicious ? "malicious" : "normal",
                             std::to_string(seq.scenario), name, format_double(score)})
                << "\n";
        }
    }
}

}  // namespace ueba
