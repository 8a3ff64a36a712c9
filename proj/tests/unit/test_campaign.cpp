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
#include "ueba/rng.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include <doctest.h>

using namespace ueba;

namespace {

AnomalyScoreRecord rec(const std::string& user, int day, double s_mask, bool malicious = false,
                       int scenario = 0, double s_value = 0.0) {
    AnomalyScoreRecord r;
    r.user = user;
    r.window_start = 1262563200 + std::int64_t(day) * 86400;
    r.s_mask = s_mask;
    r.s_value = s_value;
    r.s_combined = s_mask + 0.1 * s_value;
    r.malicious = malicious;
    r.scenario = scenario;
    return r;
}

const std::vector<double> kFixture = {0.5, 0.1, 0.9, 0.3, 0.8, 0.2};

}  // namespace

TEST_SUITE("campaign") {

TEST_CASE("sequence starts are stride-aligned with partial tails dropped") {
    SequenceConfig cfg;  // L=6, stride=3
    std::vector<AnomalyScoreRecord> records;
    for (int k = 0; k < 12; ++k) records.push_back(rec("u", k, 0.1 * k));

    SequenceExtraction ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    CHECK(ext.warnings.empty());
    REQUIRE(ext.sequences.size() == 3);
    CHECK(ext.sequences[0].start_index == 0);
    CHECK(ext.sequences[1].start_index == 3);
    CHECK(ext.sequences[2].start_index == 6);
    CHECK(ext.sequences[0].start_ts == records[0].window_start);
    CHECK(ext.sequences[1].start_ts == records[3].window_start);
    REQUIRE(ext.sequences[1].member_scores.size() == 6);
    // Member scores are the mask scores of windows 3..8 in chronological order.
    for (int j = 0; j < 6; ++j) {
        CHECK(ext.sequences[1].member_scores[j] == 0.1 * (3 + j));
    }

    records.pop_back();  // 11 windows: start 6 no longer fits
    ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    REQUIRE(ext.sequences.size() == 2);
    CHECK(ext.sequences[1].start_index == 3);

    records.resize(5);  // under L: warning, no sequences
    ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    CHECK(ext.sequences.empty());
    REQUIRE(ext.warnings.size() == 1);
    CHECK(ext.warnings[0].find("user 'u' has 5 windows") != std::string::npos);
}

TEST_CASE("sequences never span users and input order is irrelevant") {
    SequenceConfig cfg;
    std::vector<AnomalyScoreRecord> records;
    for (int k = 0; k < 6; ++k) records.push_back(rec("b", k, 1.0 + k));
    for (int k = 0; k < 6; ++k) records.push_back(rec("a", k, 0.1 * k));
    std::reverse(records.begin(), records.end());

    const SequenceExtraction ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    REQUIRE(ext.sequences.size() == 2);
    CHECK(ext.sequences[0].user == "a");
    CHECK(ext.sequences[0].member_scores.front() == 0.0);
    CHECK(ext.sequences[1].user == "b");
    CHECK(ext.sequences[1].member_scores.front() == 1.0);
}

TEST_CASE("sequence label is any-overlap and scenario is the first malicious member") {
    SequenceConfig cfg;
    std::vector<AnomalyScoreRecord> records;
    for (int k = 0; k < 12; ++k) {
        const bool mal = k == 7 || k == 8;
        records.push_back(rec("u", k, 0.5, mal, k == 7 ? 3 : (k == 8 ? 1 : 0)));
    }
    const SequenceExtraction ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    REQUIRE(ext.sequences.size() == 3);
    CHECK_FALSE(ext.sequences[0].malicious);  // windows 0..5 miss both
    CHECK(ext.sequences[0].scenario == 0);
    // Windows 3..8 contain both scenarios; the earlier member (7, scenario 3)
    // decides, not the later one (8, scenario 1).
    CHECK(ext.sequences[1].malicious);
    CHECK(ext.sequences[1].scenario == 3);
    CHECK(ext.sequences[2].malicious);  // windows 6..11 hit 7 first
    CHECK(ext.sequences[2].scenario == 3);
}

TEST_CASE("the variant selects which per-window score members carry") {
    SequenceConfig cfg;
    cfg.variant = ScoreVariant::kValue;
    std::vector<AnomalyScoreRecord> records;
    for (int k = 0; k < 6; ++k) records.push_back(rec("u", k, 9.0, false, 0, 0.25 * k));
    SequenceExtraction ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    REQUIRE(ext.sequences.size() == 1);
    CHECK(ext.sequences[0].member_scores[3] == 0.75);

    // kAuto defers to the training mode.
    cfg.variant = ScoreVariant::kAuto;
    ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    CHECK(ext.sequences[0].member_scores[3] == 9.0);
}

TEST_CASE("aggregator fixture values") {
    CHECK(aggregate_topk(kFixture, 1) == 0.9);
    CHECK(aggregate_topk(kFixture, 1) == *std::max_element(kFixture.begin(), kFixture.end()));
    CHECK(aggregate_topk(kFixture, 2) == 0.9 + 0.8);
    CHECK(aggregate_topk(kFixture, 3) == 0.9 + 0.8 + 0.5);
    CHECK(aggregate_sum(kFixture) == 0.9 + 0.8 + 0.5 + 0.3 + 0.2 + 0.1);
}

TEST_CASE("top-k with k >= L equals the sum bit for bit") {
    CHECK(aggregate_topk(kFixture, 6) == aggregate_sum(kFixture));
    CHECK(aggregate_topk(kFixture, 7) == aggregate_sum(kFixture));
    CHECK(aggregate_topk(kFixture, 100) == aggregate_sum(kFixture));
}

TEST_CASE("aggregators are permutation-invariant bit for bit") {
    Rng rng(404);
    std::vector<double> scores;
    for (int i = 0; i < 9; ++i) scores.push_back(rng.uniform(0.0, 3.0));
    const double sum0 = aggregate_sum(scores);
    const double top2 = aggregate_topk(scores, 2);
    const double top3 = aggregate_topk(scores, 3);
    for (int trial = 0; trial < 50; ++trial) {
        rng.shuffle(scores);
        CHECK(aggregate_sum(scores) == sum0);
        CHECK(aggregate_topk(scores, 2) == top2);
        CHECK(aggregate_topk(scores, 3) == top3);
    }
}

TEST_CASE("raising any member never lowers an aggregate") {
    for (std::size_t i = 0; i < kFixture.size(); ++i) {
        std::vector<double> bumped = kFixture;
        bumped[i] += 0.05;
        CHECK(aggregate_sum(bumped) >= aggregate_sum(kFixture));
        for (int k : {1, 2, 3, 6}) {
            CHECK(aggregate_topk(bumped, k) >= aggregate_topk(kFixture, k));
        }
    }
}

TEST_CASE("default aggregators and sequence scoring") {
    SequenceConfig cfg;  // topk = {2, 3}
    const std::vector<Aggregator> aggs = default_aggregators(cfg);
    REQUIRE(aggs.size() == 3);
    CHECK(aggs[0].name == "sum");
    CHECK(aggs[0].k == 0);
    CHECK(aggs[1].name == "top2");
    CHECK(aggs[1].k == 2);
    CHECK(aggs[2].name == "top3");
    CHECK(aggs[2].k == 3);

    SequenceRecord seq;
    seq.user = "u";
    seq.member_scores = kFixture;
    std::vector<SequenceRecord> sequences = {seq};
    score_sequences(sequences, aggs);
    REQUIRE(sequences[0].aggregates.size() == 3);
    CHECK(sequences[0].aggregates[0].first == "sum");
    CHECK(sequences[0].aggregates[0].second == aggregate_sum(kFixture));
    CHECK(sequences[0].aggregates[1].second == aggregate_topk(kFixture, 2));
    CHECK(sequences[0].aggregates[2].second == aggregate_topk(kFixture, 3));

    CHECK_THROWS_AS(score_sequences(sequences, {}), ConfigError);
}

TEST_CASE("sequences csv is long-format, one row per aggregate") {
    SequenceConfig cfg;
    std::vector<AnomalyScoreRecord> records;
    for (int k = 0; k < 9; ++k) records.push_back(rec("u", k, 0.1 * k, k == 8, k == 8 ? 3 : 0));
    SequenceExtraction ext = extract_sequences(records, cfg, TrainMode::kMaskOnly);
    REQUIRE(ext.sequences.size() == 2);
    score_sequences(ext.sequences, default_aggregators(cfg));

    ueba::test::TempDir dir("seqcsv");
    const std::string path = dir.file("sequences.csv");
    write_sequences_csv(ext.sequences, path);
    const std::string text = ueba::test::read_text(path);

    CHECK(text.rfind("user,start,label,scenario,agg_name,agg_score\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 3);
    CHECK(text.find("malicious,3,top2,") != std::string::npos);
    CHECK(text.find("normal,0,sum,") != std::string::npos);
}

TEST_CASE("validation rejects degenerate configs and inputs") {
    SequenceConfig cfg;
    cfg.sequence_len = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SequenceConfig{};
    cfg.stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SequenceConfig{};
    cfg.stride = 7;  // > L
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SequenceConfig{};
    cfg.topk = {2, 0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    CHECK_THROWS_AS(aggregate_sum({}), DataContractError);
    CHECK_THROWS_AS(aggregate_topk({}, 2), DataContractError);
    CHECK_THROWS_AS(aggregate_topk(kFixture, 0), ConfigError);
}

}  // TEST_SUITE
