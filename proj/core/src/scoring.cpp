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
#include "ueba/csv.hpp"
#include "ueba/losses.hpp"
#include "ueba/timeutil.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace ueba {

namespace {

Matrix head_matrix(const Tensor4& t) {
    Matrix out(t.h, t.w);
    std::copy(t.data.begin(), t.data.begin() + static_cast<std::ptrdiff_t>(out.data.size()),
              out.data.begin());
    return out;
}

double parse_double_field(const std::string& s, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataContractError(std::string("scores csv: bad ") + what + " '" + s + "'");
    }
    return v;
}

}  // namespace

void ScoreConfig::validate() const {
    if (combine_alpha < 0.0) throw ConfigError("score: combine_alpha must be >= 0");
    if (!(score_pos_weight > 0.0)) throw ConfigError("score: score_pos_weight must be > 0");
}

const char* score_variant_name(ScoreVariant v) {
    switch (v) {
        case ScoreVariant::kAuto: return "auto";
        case ScoreVariant::kMask: return "mask";
        case ScoreVariant::kValue: return "value";
        case ScoreVariant::kCombined: return "combined";
    }
    return "?";
}

ScoreVariant score_variant_from_name(const std::string& name) {
    if (name == "auto") return ScoreVariant::kAuto;
    if (name == "mask") return ScoreVariant::kMask;
    if (name == "value") return ScoreVariant::kValue;
    if (name == "combined") return ScoreVariant::kCombined;
    throw ConfigError("unknown score variant '" + name +
                      "' (expected auto|mask|value|combined)");
}

ScoreVariant resolve_variant(ScoreVariant v, TrainMode mode) {
    if (v != ScoreVariant::kAuto) return v;
    switch (mode) {
        case TrainMode::kMaskValue: return ScoreVariant::kCombined;
        case TrainMode::kMaskOnly: return ScoreVariant::kMask;
        case TrainMode::kValueOnly:
        case TrainMode::kStandardAe: return ScoreVariant::kValue;
    }
    return ScoreVariant::kCombined;
}

double selected_score(const AnomalyScoreRecord& r, ScoreVariant resolved) {
    switch (resolved) {
        case ScoreVariant::kMask: return r.s_mask;
        case ScoreVariant::kValue: return r.s_value;
        case ScoreVariant::kCombined: return r.s_combined;
        case ScoreVariant::kAuto: break;
    }
    throw ConfigError("selected_score: variant must be resolved first");
}

AnomalyScoreRecord score_window(const ModelParameters& m, const WindowSample& s,
                                const ScoreConfig& cfg) {
    cfg.validate();
    Tensor4 input(1, input_channels_for(m.mode), m.t(), m.f);
    fill_input(m, s, input, 0);  // fatal when the model carries no NormStats
    const ForwardCache cache = forward(m, input);

    const Matrix logits = head_matrix(cache.mask_logits);
    const Matrix value = head_matrix(cache.value_out);
    const Matrix v_norm = apply_norm(s.v, m.norm);

    AnomalyScoreRecord r;
    r.user = s.user;
    r.window_start = s.window_start;
    r.malicious = s.malicious;
    r.scenario = s.scenario;
    r.s_mask = bce_with_logits(logits, s.m, cfg.score_pos_weight).loss;
    r.s_value = m.mode == TrainMode::kStandardAe ? full_mse(value, v_norm).loss
                                                 : masked_mse(value, v_norm, s.m).loss;
    r.s_combined = r.s_mask + cfg.combine_alpha * r.s_value;
    return r;
}

std::vector<AnomalyScoreRecord> score_corpus(const ModelParameters& m,
                                             const std::vector<WindowSample>& samples,
                                             const ScoreConfig& cfg) {
    std::vector<AnomalyScoreRecord> out;
    out.reserve(samples.size());
    for (const WindowSample& s : samples) {
        out.push_back(score_window(m, s, cfg));
    }
    std::sort(out.begin(), out.end(), [](const AnomalyScoreRecord& a,
                                         const AnomalyScoreRecord& b) {
        if (a.user != b.user) return a.user < b.user;
        return a.window_start < b.window_start;
    });
    return out;
}

void write_scores_csv(const std::vector<AnomalyScoreRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write scores csv '" + path + "'");
    out << "user,window_start,s_mask,s_value,s_combined,label,scenario\n";
    for (const AnomalyScoreRecord& r : records) {
        out << join_csv({r.user, format_timestamp(r.window_start, kDefaultTimestampFormat),
                         format_double(r.s_mask), format_double(r.s_value),
                         format_double(r.s_combined), r.malicious ? "malicious" : "normal",
                         std::to_string(r.scenario)})
            << "\n";
    }
}

std::vector<AnomalyScoreRecord> read_scores_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<AnomalyScoreRecord> out;
    while (reader.next_row()) {
        AnomalyScoreRecord r;
        r.user = reader.field("user");
        const auto ts = parse_timestamp(reader.field("window_start"), kDefaultTimestampFormat);
        if (!ts) throw DataContractError("scores csv: bad window_start");
        r.window_start = *ts;
        r.s_mask = parse_double_field(reader.field("s_mask"), "s_mask");
        r.s_value = parse_double_field(reader.field("s_value"), "s_value");
        r.s_combined = parse_double_field(reader.field("s_combined"), "s_combined");
        const std::string& label = reader.field("label");
        if (label != "malicious" && label != "normal") {
            throw DataContractError("scores csv: bad label '" + label + "'");
        }
        r.malicious = label == "malicious";
        std::int64_t scenario = 0;
        const std::string& sc = reader.field("scenario");
        const auto [ptr, ec] = std::from_chars(sc.data(), sc.data() + sc.size(), scenario);
        if (ec != std::errc() || ptr != sc.data() + sc.size()) {
            throw DataContractError("scores csv: bad scenario '" + sc + "'");
        }
        r.scenario = static_cast<int>(scenario);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace ueba
