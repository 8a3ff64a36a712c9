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

#include "ueba/scoring.hpp"

#include "ueba/common.hpp"
#include "ueba/losses.hpp"
#include "ueba/rng.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

using namespace ueba;
using ueba::test::TempDir;

namespace {

constexpr int kT = 12;

WindowSample make_window(std::uint64_t seed, const std::string& user = "u",
                         std::int64_t start = 1262563200) {
    Rng rng(seed);
    WindowSample s;
    s.user = user;
    s.window_start = start;
    s.window_hours = kT;
    Matrix x(kT, kFeatureCount);
    for (double& c : x.data) {
        c = rng.uniform() < 0.4 ? std::floor(rng.uniform(1.0, 7.0)) : 0.0;
    }
    MaskValue mv = decompose(x);
    s.x = x;
    s.m = std::move(mv.m);
    s.v = std::move(mv.v);
    return s;
}

ModelParameters make_model(TrainMode mode, std::uint64_t seed) {
    ArchConfig arch;
    arch.latent_dim = 8;
    arch.widths = {4, 6, 8};
    LossConfig loss;
    loss.pos_weight = 2.0;
    ModelParameters m = init_model(arch, loss, mode, kT, kFeatureCount, seed);
    m.norm = compute_norm_stats({make_window(1000), make_window(1001), make_window(1002)});
    return m;
}

/// First sample, first channel of a head tensor as a matrix.
Matrix head_plane(const Tensor4& t) {
    Matrix out(t.h, t.w);
    std::copy(t.data.begin(), t.data.begin() + static_cast<std::ptrdiff_t>(out.data.size()),
              out.data.begin());
    return out;
}

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("score_window recomputes from forward outputs bit for bit") {
    const WindowSample s = make_window(7);
    const ScoreConfig cfg;

    for (TrainMode mode : {TrainMode::kMaskValue, TrainMode::kStandardAe}) {
        const ModelParameters m = make_model(mode, 17);
        const AnomalyScoreRecord r = score_window(m, s, cfg);

        Tensor4 input(1, input_channels_for(mode), kT, kFeatureCount);
        fill_input(m, s, input, 0);
        const ForwardCache cache = forward(m, input);
        const Matrix logits = head_plane(cache.mask_logits);
        const Matrix value = head_plane(cache.value_out);
        const Matrix v_norm = apply_norm(s.v, m.norm);

        CHECK(r.s_mask == bce_with_logits(logits, s.m, cfg.score_pos_weight).loss);
        if (mode == TrainMode::kStandardAe) {
            CHECK(r.s_value == full_mse(value, v_norm).loss);
        } else {
            CHECK(r.s_value == masked_mse(value, v_norm, s.m).loss);
        }
        CHECK(r.s_combined == r.s_mask + cfg.combine_alpha * r.s_value);
        CHECK(r.user == "u");
        CHECK(r.window_start == s.window_start);
        CHECK_FALSE(r.malicious);
    }
}

TEST_CASE("labels and scenarios pass through") {
    WindowSample s = make_window(8);
    s.malicious = true;
    s.scenario = 3;
    const ModelParameters m = make_model(TrainMode::kMaskOnly, 18);
    const AnomalyScoreRecord r = score_window(m, s, ScoreConfig{});
    CHECK(r.malicious);
    CHECK(r.scenario == 3);
}

TEST_CASE("variant resolution") {
    CHECK(resolve_variant(ScoreVariant::kAuto, TrainMode::kMaskValue) == ScoreVariant::kCombined);
    CHECK(resolve_variant(ScoreVariant::kAuto, TrainMode::kMaskOnly) == ScoreVariant::kMask);
    CHECK(resolve_variant(ScoreVariant::kAuto, TrainMode::kValueOnly) == ScoreVariant::kValue);
    CHECK(resolve_variant(ScoreVariant::kAuto, TrainMode::kStandardAe) == ScoreVariant::kValue);
    // Explicit choices are never overridden.
    CHECK(resolve_variant(ScoreVariant::kMask, TrainMode::kStandardAe) == ScoreVariant::kMask);
    CHECK(resolve_variant(ScoreVariant::kValue, TrainMode::kMaskOnly) == ScoreVariant::kValue);

    AnomalyScoreRecord r;
    r.s_mask = 1.0;
    r.s_value = 2.0;
    r.s_combined = 3.0;
    CHECK(selected_score(r, ScoreVariant::kMask) == 1.0);
    CHECK(selected_score(r, ScoreVariant::kValue) == 2.0);
    CHECK(selected_score(r, ScoreVariant::kCombined) == 3.0);
    CHECK_THROWS_AS(selected_score(r, ScoreVariant::kAuto), ConfigError);

    for (ScoreVariant v : {ScoreVariant::kAuto, ScoreVariant::kMask, ScoreVariant::kValue,
                           ScoreVariant::kCombined}) {
        CHECK(score_variant_from_name(score_variant_name(v)) == v);
    }
    CHECK_THROWS_AS(score_variant_from_name("hybrid"), ConfigError);
}

TEST_CASE("score_corpus sorts by user then window_start") {
    const ModelParameters m = make_model(TrainMode::kMaskValue, 19);
    const std::vector<WindowSample> samples = {
        make_window(1, "b", 2000000000),
        make_window(2, "a", 1500000000),
        make_window(3, "b", 1000000000),
        make_window(4, "a", 1000000000),
    };
    const std::vector<AnomalyScoreRecord> records = score_corpus(m, samples, ScoreConfig{});
    REQUIRE(records.size() == 4);
    CHECK(records[0].user == "a");
    CHECK(records[0].window_start == 1000000000);
    CHECK(records[1].user == "a");
    CHECK(records[1].window_start == 1500000000);
    CHECK(records[2].user == "b");
    CHECK(records[2].window_start == 1000000000);
    CHECK(records[3].user == "b");
    CHECK(records[3].window_start == 2000000000);

    // Scoring is per-window: order of the input changes nothing.
    std::vector<WindowSample> shuffled = {samples[3], samples[0], samples[2], samples[1]};
    const std::vector<AnomalyScoreRecord> again = score_corpus(m, shuffled, ScoreConfig{});
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].s_mask == again[i].s_mask);
        CHECK(records[i].s_value == again[i].s_value);
        CHECK(records[i].s_combined == again[i].s_combined);
    }
}

TEST_CASE("scores csv round-trips exactly") {
    std::vector<AnomalyScoreRecord> records;
    AnomalyScoreRecord a;
    a.user = "alice";
    a.window_start = 1262563200;
    a.s_mask = 1.0 / 3.0;
    a.s_value = 1e-17;
    a.s_combined = 1.0 / 3.0 + 0.1 * 1e-17;
    a.malicious = true;
    a.scenario = 1;
    AnomalyScoreRecord b;
    b.user = "bob";
    b.window_start = 1262649600;
    b.s_mask = 0.1;
    b.s_value = 123456.789012345;
    b.s_combined = 0.0;
    records = {a, b};

    TempDir dir("scores");
    const std::string path = dir.file("scores.csv");
    write_scores_csv(records, path);

    const std::string text = ueba::test::read_text(path);
    CHECK(text.rfind("user,window_start,s_mask,s_value,s_combined,label,scenario\n", 0) == 0);

    const std::vector<AnomalyScoreRecord> back = read_scores_csv(path);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].user == records[i].user);
        CHECK(back[i].window_start == records[i].window_start);
        CHECK(back[i].s_mask == records[i].s_mask);
        CHECK(back[i].s_value == records[i].s_value);
        CHECK(back[i].s_combined == records[i].s_combined);
        CHECK(back[i].malicious == records[i].malicious);
        CHECK(back[i].scenario == records[i].scenario);
    }

    // Rewriting the parsed records reproduces the file byte for byte.
    const std::string path2 = dir.file("scores2.csv");
    write_scores_csv(back, path2);
    CHECK(ueba::test::read_text(path2) == text);
}

TEST_CASE("config validation and missing stats are fatal") {
    ScoreConfig bad;
    bad.combine_alpha = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = ScoreConfig{};
    bad.score_pos_weight = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    ArchConfig arch;
    arch.latent_dim = 8;
    arch.widths = {4, 6, 8};
    const ModelParameters bare =
        init_model(arch, LossConfig{}, TrainMode::kMaskValue, kT, kFeatureCount, 20);
    CHECK_THROWS_AS(score_window(bare, make_window(9), ScoreConfig{}), DataContractError);
}

}  // TEST_SUITE
