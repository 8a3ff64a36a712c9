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

#include "ueba/metrics.hpp"

#include "ueba/common.hpp"
#include "ueba/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace ueba {

namespace {

struct ThresholdGroup {
    double score = 0.0;
    std::int64_t pos = 0;
    std::int64_t neg = 0;
};

/// Distinct scores descending with per-group label counts.
std::vector<ThresholdGroup> group_by_threshold(const std::vector<LabeledScore>& items) {
    std::vector<const LabeledScore*> sorted;
    sorted.reserve(items.size());
    for (const LabeledScore& it : items) {
        if (it.label != 0 && it.label != 1) {
            throw DataContractError("metrics: labels must be 0 or 1");
        }
        if (!std::isfinite(it.score)) {
            throw DataContractError("metrics: non-finite score");
        }
        sorted.push_back(&it);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const LabeledScore* a, const LabeledScore* b) { return a->score > b->score; });

    std::vector<ThresholdGroup> groups;
    for (const LabeledScore* it : sorted) {
        if (groups.empty() || groups.back().score != it->score) {
            groups.push_back({it->score, 0, 0});
        }
        (it->label == 1 ? groups.back().pos : groups.back().neg) += 1;
    }
    return groups;
}

void require_both_classes(std::int64_t positives, std::int64_t negatives) {
    if (positives == 0) {
        throw DataContractError("metrics: no positive items (cannot rank what never occurs)");
    }
    if (negatives == 0) {
        throw DataContractError("metrics: no negative items");
    }
}

}  // namespace

std::vector<CurvePoint> pr_curve(const std::vector<LabeledScore>& items) {
    const std::vector<ThresholdGroup> groups = group_by_threshold(items);
    std::int64_t total_pos = 0;
    std::int64_t total_neg = 0;
    for (const ThresholdGroup& g : groups) {
        total_pos += g.pos;
        total_neg += g.neg;
    }
    require_both_classes(total_pos, total_neg);

    std::vector<CurvePoint> curve;
    curve.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0, 0, 0});  // anchor

    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (const ThresholdGroup& g : groups) {
        tp += g.pos;
        fp += g.neg;
        CurvePoint p;
        p.threshold = g.score;
        p.tp = tp;
        p.fp = fp;
        p.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        p.recall = static_cast<double>(tp) / static_cast<double>(total_pos);
        curve.push_back(p);
    }
    return curve;
}

double pr_auc(const std::vector<LabeledScore>& items) {
    const std::vector<ThresholdGroup> groups = group_by_threshold(items);
    std::int64_t total_pos = 0;
    std::int64_t total_neg = 0;
    for (const ThresholdGroup& g : groups) {
        total_pos += g.pos;
        total_neg += g.neg;
    }
    require_both_classes(total_pos, total_neg);

    // Sum of (tp gained at this threshold) * (precision at this threshold),
    // descending; normalized once at the end. The brute-force oracle in the
    // test suite walks thresholds in the same order, making the doubles
    // comparable bit for bit.
    double sum = 0.0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (const ThresholdGroup& g : groups) {
        tp += g.pos;
        fp += g.neg;
        if (g.pos > 0) {
            sum += static_cast<double>(g.pos) *
                   (static_cast<double>(tp) / static_cast<double>(tp + fp));
        }
    }
    return sum / static_cast<double>(total_pos);
}

double roc_auc(const std::vector<LabeledScore>& items) {
    const std::vector<ThresholdGroup> groups = group_by_threshold(items);
    std::int64_t total_pos = 0;
    std::int64_t total_neg = 0;
    for (const ThresholdGroup& g : groups) {
        total_pos += g.pos;
        total_neg += g.neg;
    }
    require_both_classes(total_pos, total_neg);

    // Integer numerator: 2 per (pos above neg) pair + 1 per tied pair.
    std::int64_t seen_neg = 0;
    std::int64_t numerator2 = 0;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {  // ascending scores
        numerator2 += it->pos * (2 * seen_neg + it->neg);
        seen_neg += it->neg;
    }
    return static_cast<double>(numerator2) /
           (2.0 * static_cast<double>(total_pos) * static_cast<double>(total_neg));
}

std::optional<OperatingPoint> operating_point(const std::vector<LabeledScore>& items,
                                              double min_precision) {
    const std::vector<CurvePoint> curve = pr_curve(items);
    std::optional<OperatingPoint> best;
    for (std::size_t i = 1; i < curve.size(); ++i) {  // skip the anchor
        const CurvePoint& p = curve[i];
        if (p.precision < min_precision) continue;
        if (!best || p.recall > best->recall ||
            (p.recall == best->recall && p.precision > best->precision)) {
            best = OperatingPoint{p.threshold, p.precision, p.recall};
        }
    }
    return best;
}

std::vector<StratumMetrics> stratified_report(const std::vector<LabeledScore>& items) {
    std::map<int, std::vector<LabeledScore>> per_scenario;
    std::vector<LabeledScore> negatives;
    std::int64_t total_pos = 0;
    for (const LabeledScore& it : items) {
        if (it.label == 1) {
            per_scenario[it.scenario].push_back(it);
            ++total_pos;
        } else {
            negatives.push_back(it);
        }
    }

    std::vector<StratumMetrics> out;
    for (const auto& [scenario, positives] : per_scenario) {
        StratumMetrics row;
        row.name = "scenario_" + std::to_string(scenario);
        row.positives = static_cast<std::int64_t>(positives.size());
        row.negatives = static_cast<std::int64_t>(negatives.size());
        std::vector<LabeledScore> subset = positives;
        subset.insert(subset.end(), negatives.begin(), negatives.end());
        if (!positives.empty() && !negatives.empty()) {
            row.pr_auc = pr_auc(subset);
            row.roc_auc = roc_auc(subset);
            row.valid = true;
        }
        out.push_back(std::move(row));
    }

    StratumMetrics overall;
    overall.name = "overall";
    overall.positives = total_pos;
    overall.negatives = static_cast<std::int64_t>(negatives.size());
    if (total_pos > 0 && !negatives.empty()) {
        overall.pr_auc = pr_auc(items);
        overall.roc_auc = roc_auc(items);
        overall.valid = true;
    }
    out.push_back(std::move(overall));
    return out;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write curve csv '" + path + "'");
    out << "threshold,precision,recall,tp,fp\n";
    for (const CurvePoint& p : curve) {
        out << join_csv({format_double(p.threshold), format_double(p.precision),
                         format_double(p.recall), std::to_string(p.tp), std::to_string(p.fp)})
            << "\n";
    }
}

}  // namespace ueba
