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

#include "ueba/audit.hpp"
#include "ueba/campaign.hpp"
#include "ueba/generator.hpp"
#include "ueba/metrics.hpp"
#include "ueba/model.hpp"
#include "ueba/scoring.hpp"
#include "ueba/windowing.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ueba {

/// The single declarative config every subcommand consumes. JSON on disk;
/// unknown keys are rejected so typos fail loudly. Every run writes the
/// resolved tree to <out_dir>/resolved_config.json.
struct RunConfig {
    std::uint64_t seed = 7;
    std::string data_dir = "corpus";
    std::string out_dir = "out";
    std::string checkpoint;  // empty -> <out_dir>/model.ckpt

    GeneratorConfig generator;
    IngestSchema ingest;
    WindowConfig window;
    SplitConfig split;
    ArchConfig arch;
    LossConfig loss;  // pos_weight 0 means auto-resolve from the training set
    TrainConfig train;
    ScoreConfig score;
    SequenceConfig sequence;
    double min_precision = 1.0;            // operating-point constraint
    std::vector<int> sweep_hours = {12, 24, 48};
    bool filter_to_compromised = true;
    bool dump_windows = false;

    std::string checkpoint_path() const;

    static RunConfig defaults();
    static RunConfig from_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text, const std::string& origin);

    /// Full resolved tree as pretty JSON (stable key order).
    std::string to_json_text() const;
};

/// Writes <out_dir>/resolved_config.json (and creates out_dir).
void write_resolved_config(const RunConfig& cfg);

struct GenerateOutcome {
    std::int64_t n_events = 0;
    std::size_t n_campaigns = 0;
};

/// Synthesizes the corpus into data_dir and snapshots the config.
GenerateOutcome run_generate(const RunConfig& cfg);

/// Everything the ingest half of the pipeline produces, shared by the
/// train/evaluate/campaign commands.
struct Dataset {
    EventStreams streams;
    std::vector<AttackInterval> truth;
    std::vector<WindowSample> windows;
    SplitResult split;
    std::vector<std::string> warnings;
};

Dataset load_dataset(const RunConfig& cfg);

struct TrainOutcome {
    std::string checkpoint_path;
    std::vector<EpochStats> history;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
};

/// ingest -> window -> split -> normalize -> train -> checkpoint; also emits
/// train_history.csv and the resolved config.
TrainOutcome run_train(const RunConfig& cfg);

struct EvaluateOutcome {
    std::vector<AnomalyScoreRecord> records;
    std::vector<StratumMetrics> report;
    std::optional<OperatingPoint> op_point;
    std::string scores_csv;
    std::string metrics_json;
};

/// Scores the test split and emits scores.csv, metrics.json, and per-stratum
/// PR curves under curves/.
EvaluateOutcome run_evaluate(const RunConfig& cfg);

struct CampaignOutcome {
    std::vector<SequenceRecord> sequences;
    // Rows per (aggregator, stratum).
    std::vector<std::pair<std::string, StratumMetrics>> report;
    std::string sequences_csv;
    std::string metrics_json;
};

/// Sequence-level evaluation with sum and top-k aggregators; emits
/// sequences.csv, campaign_metrics.json, and per-aggregator curves.
CampaignOutcome run_campaign(const RunConfig& cfg);

struct SweepLeg {
    int window_hours = 0;
    double pr_auc = 0.0;
    double roc_auc = 0.0;
    double runtime_seconds = 0.0;
};

/// Trains and evaluates once per window duration with everything else held
/// constant; emits sweep.csv and sweep.json.
std::vector<SweepLeg> run_sweep(const RunConfig& cfg);

}  // namespace ueba
