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

#include "ueba/generator.hpp"

#include "ueba/common.hpp"
#include "ueba/rng.hpp"
#include "ueba/timeutil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <tuple>

namespace ueba {

namespace {

// Monday 2010-01-04 00:00:00 UTC; day d of the corpus starts at
// kBaseTimestamp + d * kSecondsPerDay.
const std::int64_t kBaseTimestamp = make_timestamp(2010, 1, 4, 0, 0, 0);

std::string user_name(int u) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "U%04d", u + 1);
    return buf;
}

int scaled(Rng& rng, int lo, int hi, double intensity) {
    const int n = static_cast<int>(rng.uniform_int(lo, hi));
    return std::max(1, static_cast<int>(std::lround(n * intensity)));
}

void validate(const GeneratorConfig& cfg) {
    if (cfg.n_users <= 0 || cfg.n_days <= 0) {
        throw ConfigError("generator: n_users and n_days must be positive");
    }
    if (cfg.rate_logon < 0 || cfg.rate_device < 0 || cfg.rate_file < 0 || cfg.rate_email < 0 ||
        cfg.rate_http < 0) {
        throw ConfigError("generator: rates must be nonnegative");
    }
    if (cfg.work_start_hour < 0 || cfg.work_end_hour <= cfg.work_start_hour ||
        cfg.work_end_hour > 24) {
        throw ConfigError("generator: work hours must satisfy 0 <= start < end <= 24");
    }
    if (cfg.burst_prob < 0.0 || cfg.burst_prob > 1.0 || cfg.evening_prob < 0.0 ||
        cfg.evening_prob > 1.0 || cfg.owl_user_prob < 0.0 || cfg.owl_user_prob > 1.0 ||
        cfg.owl_evening_prob < 0.0 || cfg.owl_evening_prob > 1.0) {
        throw ConfigError("generator: probabilities must be in [0, 1]");
    }
    if (cfg.burst_factor_min < 1.0 || cfg.burst_factor_max < cfg.burst_factor_min) {
        throw ConfigError("generator: burst factors must satisfy 1 <= min <= max");
    }
    int total_campaigns = 0;
    for (const AttackSpec& spec : cfg.attacks) {
        if (spec.scenario != 1 && spec.scenario != 3) {
            throw ConfigError("generator: scenario must be 1 or 3");
        }
        if (spec.n_campaigns < 0) throw ConfigError("generator: n_campaigns must be >= 0");
        if (spec.min_days < 2 || spec.max_days > 6 || spec.min_days > spec.max_days) {
            throw ConfigError(
                "generator: campaign length must satisfy 2 <= min_days <= max_days <= 6");
        }
        if (spec.n_campaigns > 0 &&
            (cfg.attack_min_day < 0 || cfg.attack_min_day > cfg.attack_max_day ||
             cfg.attack_max_day + spec.max_days > cfg.n_days)) {
            throw ConfigError("generator: campaign window must fit inside [0, n_days)");
        }
        total_campaigns += spec.n_campaigns;
    }
    if (total_campaigns > cfg.n_users) {
        throw ConfigError("generator: more campaigns than users (campaigns use distinct users)");
    }
    for (const AttackSpec& spec : cfg.attacks) {
        if (!(spec.intensity > 0.0)) {
            throw ConfigError("generator: intensity must be positive");
        }
    }
}

}  // namespace

GeneratorConfig GeneratorConfig::desk_default() {
    GeneratorConfig cfg;
    // Short always-on scenario-1 campaigns, longer scenario-3 campaigns whose
    // activity is concentrated in 1-2 days.
    cfg.attacks = {
        AttackSpec{1, 5, 2, 3, 1.0},
        AttackSpec{3, 4, 4, 5, 1.0},
    };
    return cfg;
}

GeneratedCorpus generate_corpus(const GeneratorConfig& cfg) {
    validate(cfg);

    Rng master(cfg.seed);
    // Fixed fork order: user streams must not depend on the attack config, so
    // the injected events of any run equal the multiset difference against an
    // attack-free run with the same seed.
    Rng rng_users = master.fork(1);
    Rng rng_assign = master.fork(2);
    Rng rng_campaigns = master.fork(3);

    GeneratedCorpus out;

    for (int u = 0; u < cfg.n_users; ++u) {
        Rng rng = rng_users.fork(static_cast<std::uint64_t>(u) + 1);
        const std::string user = user_name(u);
        const std::string primary_pc = "PC-" + user;
        const double phi = rng.uniform(0.7, 1.3);

        // Per-user browsing profile: 30 domains out of a global pool of 200.
        std::vector<int> domains(30);
        for (int& d : domains) d = static_cast<int>(rng.uniform_int(0, 199));

        const bool owl = rng.uniform() < cfg.owl_user_prob;
        bool in_crunch = false;

        std::vector<AuditEvent>& events = out.streams[user];
        auto emit = [&](std::int64_t ts, Modality m, Action a, std::string entity,
                        int attachments = 0) {
            events.push_back(AuditEvent{user, ts, m, a, std::move(entity), attachments});
        };

        char buf[48];
        const int work_len = cfg.work_end_hour - cfg.work_start_hour;
        for (int d = 0; d < cfg.n_days; ++d) {
            const std::int64_t day_start = kBaseTimestamp + d * kSecondsPerDay;

            // Today's benign texture is decided up front so the draw order
            // stays fixed: an optional heavy stretch and an optional late
            // evening, both independent of any attack config.
            int burst_h0 = -1, burst_h1 = -1;
            double burst_factor = 1.0;
            if (rng.uniform() < cfg.burst_prob) {
                const int span = static_cast<int>(rng.uniform_int(1, std::min(3, work_len)));
                burst_h0 = cfg.work_start_hour +
                           static_cast<int>(rng.uniform_int(0, work_len - span));
                burst_h1 = burst_h0 + span;
                burst_factor = rng.uniform(cfg.burst_factor_min, cfg.burst_factor_max);
            }

            emit(day_start + cfg.work_start_hour * kSecondsPerHour + rng.uniform_int(0, 1799),
                 Modality::kLogon, Action::kLogon, primary_pc);
            emit(day_start + (cfg.work_end_hour - 1) * kSecondsPerHour +
                     rng.uniform_int(1800, 3599),
                 Modality::kLogon, Action::kLogoff, primary_pc);

            for (int h = cfg.work_start_hour; h < cfg.work_end_hour; ++h) {
                const std::int64_t hour_start = day_start + h * kSecondsPerHour;
                auto jitter = [&] { return hour_start + rng.uniform_int(0, 3599); };
                const double boost = (h >= burst_h0 && h < burst_h1) ? burst_factor : 1.0;

                const int n_logon = rng.poisson(cfg.rate_logon * phi);
                for (int i = 0; i < n_logon; ++i) {
                    emit(jitter(), Modality::kLogon, Action::kLogon, primary_pc);
                }

                const int n_device = rng.poisson(cfg.rate_device * phi);
                for (int i = 0; i < n_device; ++i) {
                    const std::int64_t t = jitter();
                    emit(t, Modality::kDevice, Action::kConnect, primary_pc);
                    emit(t + rng.uniform_int(60, 1800), Modality::kDevice, Action::kDisconnect,
                         primary_pc);
                }

                const int n_file = rng.poisson(cfg.rate_file * phi * boost);
                for (int i = 0; i < n_file; ++i) {
                    std::snprintf(buf, sizeof(buf), "%s_doc%03d.dat", user.c_str(),
                                  static_cast<int>(rng.uniform_int(0, 59)));
                    emit(jitter(), Modality::kFile, Action::kAccess, buf);
                }

                const int n_email = rng.poisson(cfg.rate_email * phi * boost);
                for (int i = 0; i < n_email; ++i) {
                    std::snprintf(buf, sizeof(buf), "%s.peer%02d@corp.example.com", user.c_str(),
                                  static_cast<int>(rng.uniform_int(0, 14)));
                    emit(jitter(), Modality::kEmail, Action::kSend, buf, rng.poisson(0.3));
                }

                const int n_http = rng.poisson(cfg.rate_http * phi * boost);
                for (int i = 0; i < n_http; ++i) {
                    std::snprintf(buf, sizeof(buf), "site%03d.example.com",
                                  domains[rng.uniform_int(0, 29)]);
                    emit(jitter(), Modality::kHttp, Action::kVisit, buf);
                }
            }

            // Owl evenings arrive in multi-day crunch streaks (a two-state
            // chain: enter 0.08/day, stay 0.8, mean streak ~5 days), so one
            // streak elevates several consecutive windows at once. Everyone
            // else works late only occasionally.
            if (owl) in_crunch = rng.uniform() < (in_crunch ? 0.8 : 0.08);
            const bool crunch = owl && in_crunch;
            if (rng.uniform() < (crunch ? cfg.owl_evening_prob : cfg.evening_prob)) {
                const int n_evening =
                    static_cast<int>(crunch ? rng.uniform_int(3, 6) : rng.uniform_int(1, 3));
                for (int i = 0; i < n_evening; ++i) {
                    const std::int64_t t = day_start + rng.uniform_int(18, 23) * kSecondsPerHour +
                                           rng.uniform_int(0, 3599);
                    const double kind = rng.uniform();
                    if (kind < 0.4) {
                        std::snprintf(buf, sizeof(buf), "site%03d.example.com",
                                      domains[rng.uniform_int(0, 29)]);
                        emit(t, Modality::kHttp, Action::kVisit, buf);
                    } else if (kind < 0.6) {
                        // Late mail with the day's files attached keeps evening
                        // email cells ordinary.
                        std::snprintf(buf, sizeof(buf), "%s.peer%02d@corp.example.com",
                                      user.c_str(), static_cast<int>(rng.uniform_int(0, 14)));
                        emit(t, Modality::kEmail, Action::kSend, buf, rng.poisson(0.8));
                    } else if (kind < 0.8 || !crunch) {
                        std::snprintf(buf, sizeof(buf), "%s_doc%03d.dat", user.c_str(),
                                      static_cast<int>(rng.uniform_int(0, 59)));
                        emit(t, Modality::kFile, Action::kAccess, buf);
                    } else {
                        // Crunching owls sometimes take work home on a stick;
                        // evening device use is rare, not impossible.
                        emit(t, Modality::kDevice, Action::kConnect, primary_pc);
                        emit(t + rng.uniform_int(60, 1200), Modality::kDevice,
                             Action::kDisconnect, primary_pc);
                    }
                }
            }
        }
    }

    // Campaign assignment: distinct users, spec order, then per-campaign
    // injection from an independent stream.
    std::vector<int> user_order(cfg.n_users);
    std::iota(user_order.begin(), user_order.end(), 0);
    rng_assign.shuffle(user_order);

    int campaign_idx = 0;
    for (const AttackSpec& spec : cfg.attacks) {
        for (int c = 0; c < spec.n_campaigns; ++c, ++campaign_idx) {
            Rng rng = rng_campaigns.fork(static_cast<std::uint64_t>(campaign_idx) + 1);
            const int u = user_order[campaign_idx];
            const std::string user = user_name(u);
            const std::string primary_pc = "PC-" + user;

            const int len_days = static_cast<int>(rng.uniform_int(spec.min_days, spec.max_days));
            const int start_day =
                static_cast<int>(rng.uniform_int(cfg.attack_min_day, cfg.attack_max_day));

            AttackInterval iv;
            iv.user = user;
            iv.scenario = spec.scenario;
            iv.start = kBaseTimestamp + static_cast<std::int64_t>(start_day) * kSecondsPerDay;
            iv.end = iv.start + static_cast<std::int64_t>(len_days) * kSecondsPerDay;
            out.truth.push_back(iv);

            std::vector<AuditEvent>& events = out.streams[user];
            auto emit = [&](std::int64_t ts, Modality m, Action a, std::string entity,
                            int attachments = 0) {
                events.push_back(AuditEvent{user, ts, m, a, std::move(entity), attachments});
            };

            char buf[48];
            if (spec.scenario == 1) {
                // Spread over every campaign day and deliberately
                // low-magnitude: a late-night logon or two plus a few evening
                // mails to recipients outside the normal pool. The counts sit
                // inside the benign range; what is off is which cells light up.
                for (int k = 0; k < len_days; ++k) {
                    const std::int64_t day_start =
                        iv.start + static_cast<std::int64_t>(k) * kSecondsPerDay;
                    // One event per distinct hour: the footprint is wide but
                    // every count stays in the benign range.
                    std::vector<int> night_hours = {0, 1, 2, 3, 4, 5};
                    rng.shuffle(night_hours);
                    const int n_logon = std::min<int>(6, scaled(rng, 3, 4, spec.intensity));
                    for (int i = 0; i < n_logon; ++i) {
                        emit(day_start + night_hours[i] * kSecondsPerHour +
                                 rng.uniform_int(0, 3599),
                             Modality::kLogon, Action::kLogon, primary_pc);
                    }
                    const int n_email = scaled(rng, 3, 5, spec.intensity);
                    for (int i = 0; i < n_email; ++i) {
                        std::snprintf(buf, sizeof(buf), "drop%02d@ext%02d.example.net",
                                      static_cast<int>(rng.uniform_int(0, 49)),
                                      static_cast<int>(rng.uniform_int(0, 9)));
                        emit(day_start + (19 + (i % 4)) * kSecondsPerHour +
                                 rng.uniform_int(0, 3599),
                             Modality::kEmail, Action::kSend, buf,
                             static_cast<int>(rng.uniform_int(1, 2)));
                    }
                }
            } else {
                // Concentrated in 1-2 active days: evening device and file
                // bursts with fresh filenames.
                const int n_active = static_cast<int>(
                    rng.uniform_int(1, std::min(2, len_days)));
                std::vector<int> offsets(len_days);
                std::iota(offsets.begin(), offsets.end(), 0);
                rng.shuffle(offsets);
                offsets.resize(n_active);
                std::sort(offsets.begin(), offsets.end());

                // Campaign aggressiveness varies: weak campaigns sit near the
                // chronic benign noise floor and separate only when evidence
                // is pooled the right way.
                const double strength = rng.uniform(0.35, 1.0) * spec.intensity;

                int file_seq = 0;
                for (int k : offsets) {
                    const std::int64_t day_start =
                        iv.start + static_cast<std::int64_t>(k) * kSecondsPerDay;
                    const int n_device = scaled(rng, 6, 12, strength);
                    for (int i = 0; i < n_device; ++i) {
                        const std::int64_t t = day_start +
                                               rng.uniform_int(18, 22) * kSecondsPerHour +
                                               rng.uniform_int(0, 3599);
                        emit(t, Modality::kDevice, Action::kConnect, primary_pc);
                        emit(t + rng.uniform_int(30, 600), Modality::kDevice,
                             Action::kDisconnect, primary_pc);
                    }
                    const int n_file = scaled(rng, 12, 22, strength);
                    for (int i = 0; i < n_file; ++i) {
                        std::snprintf(buf, sizeof(buf), "exfil_c%02d_%04d.dat", campaign_idx,
                                      file_seq++);
                        emit(day_start + rng.uniform_int(18, 22) * kSecondsPerHour +
                                 rng.uniform_int(0, 3599),
                             Modality::kFile, Action::kAccess, buf);
                    }
                }
            }
        }
    }

    // Same canonical order parse_events produces, so generate -> write ->
    // parse is the identity on streams.
    for (auto& [user, events] : out.streams) {
        std::stable_sort(events.begin(), events.end(),
                         [](const AuditEvent& a, const AuditEvent& b) {
                             if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                             return std::make_tuple(std::string(modality_name(a.modality)),
                                                    a.entity, std::string(action_name(a.action)),
                                                    a.attachment_count) <
                                    std::make_tuple(std::string(modality_name(b.modality)),
                                                    b.entity, std::string(action_name(b.action)),
                                                    b.attachment_count);
                         });
    }
    std::sort(out.truth.begin(), out.truth.end(),
              [](const AttackInterval& a, const AttackInterval& b) {
                  if (a.user != b.user) return a.user < b.user;
                  if (a.start != b.start) return a.start < b.start;
                  return a.end < b.end;
              });
    return out;
}

}  // namespace ueba
