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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ueba {

struct LabeledScore {
    double score = 0.0;
    int label = 0;     // 0 or 1
    int scenario = 0;  // stratum tag; 0 on negatives
    std::string user;  // optional stratum tag
};

struct CurvePoint {
    double threshold = 0.0;  // +inf on the zero-prediction anchor
    double precision = 0.0;
    double recall = 0.0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
};

/// One point per distinct threshold, descending, preceded by the
/// (precision 1, recall 0) anchor. Tied scores cross the threshold together.
std::vector<CurvePoint> pr_curve(const std::vector<LabeledScore>& items);

/// Average precision over grouped thresholds: each threshold group
/// contributes (tp gained) * (precision after the group); the anchor point
/// never contributes. Requires >= 1 positive and >= 1 negative.
double pr_auc(const std::vector<LabeledScore>& items);

/// Exact rank statistic P(pos > neg) + 0.5 * P(tie): the numerator is
/// accumulated in integers, so equal rankings give bit-identical results.
double roc_auc(const std::vector<LabeledScore>& items);

struct OperatingPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// Highest-recall real threshold with precision >= min_precision; the anchor
/// does not count. Absence is a value, not an error.
std::optional<OperatingPoint> operating_point(const std::vector<LabeledScore>& items,
                                              double min_precision);

struct StratumMetrics {
    std::string name;
    double pr_auc = 0.0;
    double roc_auc = 0.0;
    std::int64_t positives = 0;
    std::int64_t negatives = 0;
    bool valid = false;  // false when the stratum has no positives
};

/// Per-scenario rows (that scenario's positives against all negatives) plus
/// an "overall" row.
std::vector<StratumMetrics> stratified_report(const std::vector<LabeledScore>& items);

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path);

}  // namespace ueba
