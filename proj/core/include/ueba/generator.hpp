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

#include <cstdint>
#include <vector>

namespace ueba {

/// One flavor of injected campaign. Scenario 1 spreads off-hours logons and
/// evening email exfiltration across every campaign day; scenario 3
/// concentrates device and file bursts in 1-2 active days.
struct AttackSpec {
    int scenario = 1;  // 1 or 3
    int n_campaigns = 0;
    int min_days = 2;  // whole days; kept within the open (1, 7) day interval
    int max_days = 6;
    double intensity = 1.0;  // scales injected event counts
};

struct GeneratorConfig {
    int n_users = 20;
    int n_days = 120;
    std::uint64_t seed = 7;

    // Poisson rates per work hour, before the per-user activity multiplier.
    double rate_logon = 0.05;  // extra re-logins beyond the daily ritual pair
    double rate_device = 0.1;
    double rate_file = 1.0;
    double rate_email = 0.8;
    double rate_http = 3.0;

    int work_start_hour = 8;
    int work_end_hour = 18;  // exclusive

    // Benign magnitude noise: with probability burst_prob per user-day, a
    // 1-3 hour stretch runs file/email/http at burst_factor times the base
    // rate. Activity presence barely changes (those cells were active
    // anyway); magnitudes become heavy-tailed the way real desks are.
    double burst_prob = 0.3;
    double burst_factor_min = 5.0;
    double burst_factor_max = 14.0;
    // Benign off-hours noise: with probability evening_prob per user-day a
    // couple of late http/file events land in the 18-23h band, so evening
    // activity alone is never proof of compromise.
    double evening_prob = 0.12;
    // A fraction of users are habitual late workers whose evening activity
    // arrives in multi-day crunch streaks. The model is global, so a streak
    // reads as several consecutive mildly anomalous windows; score aggregates
    // have to cope with that baseline shift.
    double owl_user_prob = 0.25;
    double owl_evening_prob = 0.9;  // per-day evening probability inside a crunch

    // Campaign start days are drawn from [attack_min_day, attack_max_day].
    int attack_min_day = 70;
    int attack_max_day = 90;

    std::vector<AttackSpec> attacks;

    /// 20 users, 120 days, 5 scenario-1 (2-3 day) + 4 scenario-3 (4-5 day)
    /// campaigns on distinct users.
    static GeneratorConfig desk_default();
};

struct GeneratedCorpus {
    EventStreams streams;
    std::vector<AttackInterval> truth;
};

/// Pure function of the config: same config (seed included) yields
/// bit-identical output. Normal activity is unchanged by adding or removing
/// attack specs, so the injected event set equals the multiset difference
/// against an attack-free run.
GeneratedCorpus generate_corpus(const GeneratorConfig& cfg);

}  // namespace ueba
