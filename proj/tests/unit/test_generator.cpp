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
#include "ueba/timeutil.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <doctest.h>

using namespace ueba;

namespace {

const std::int64_t kBase = make_timestamp(2010, 1, 4, 0, 0, 0);  // corpus day 0

GeneratorConfig small_config() {
    GeneratorConfig cfg;
    cfg.n_users = 6;
    cfg.n_days = 40;
    cfg.seed = 123;
    cfg.attack_min_day = 15;
    cfg.attack_max_day = 30;
    cfg.attacks = {
        AttackSpec{1, 2, 2, 3, 1.0},
        AttackSpec{3, 2, 4, 5, 1.0},
    };
    return cfg;
}

using EventKey = std::tuple<std::string, std::int64_t, int, int, std::string, int>;

EventKey key_of(const AuditEvent& e) {
    return {e.user, e.timestamp, static_cast<int>(e.modality), static_cast<int>(e.action),
            e.entity, e.attachment_count};
}

/// Multiset difference lhs - rhs, as events.
std::vector<AuditEvent> multiset_diff(const std::vector<AuditEvent>& lhs,
                                      const std::vector<AuditEvent>& rhs) {
    std::map<EventKey, int> counts;
    for (const AuditEvent& e : rhs) ++counts[key_of(e)];
    std::vector<AuditEvent> out;
    for (const AuditEvent& e : lhs) {
        auto it = counts.find(key_of(e));
        if (it != counts.end() && it->second > 0) {
            --it->second;
        } else {
            out.push_back(e);
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("generator") {

TEST_CASE("same config yields bit-identical corpora") {
    const GeneratorConfig cfg = small_config();
    const GeneratedCorpus a = generate_corpus(cfg);
    const GeneratedCorpus b = generate_corpus(cfg);

    REQUIRE(a.streams.size() == b.streams.size());
    for (const auto& [user, events] : a.streams) {
        REQUIRE(b.streams.count(user) == 1);
        CHECK(events == b.streams.at(user));
    }
    REQUIRE(a.truth.size() == b.truth.size());
    for (std::size_t i = 0; i < a.truth.size(); ++i) {
        CHECK(a.truth[i].user == b.truth[i].user);
        CHECK(a.truth[i].scenario == b.truth[i].scenario);
        CHECK(a.truth[i].start == b.truth[i].start);
        CHECK(a.truth[i].end == b.truth[i].end);
    }

    GeneratorConfig other = cfg;
    other.seed = 124;
    const GeneratedCorpus c = generate_corpus(other);
    bool any_diff = false;
    for (const auto& [user, events] : a.streams) {
        if (c.streams.at(user) != events) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("streams are sorted, in range, and cover every user") {
    const GeneratorConfig cfg = small_config();
    const GeneratedCorpus corpus = generate_corpus(cfg);
    const std::int64_t end_of_corpus = kBase + std::int64_t(cfg.n_days) * 86400;

    CHECK(corpus.streams.size() == std::size_t(cfg.n_users));
    for (const auto& [user, events] : corpus.streams) {
        REQUIRE(!events.empty());
        for (std::size_t i = 0; i < events.size(); ++i) {
            CHECK(events[i].user == user);
            CHECK(events[i].timestamp >= kBase);
            CHECK(events[i].timestamp < end_of_corpus);
            if (i > 0) CHECK(events[i - 1].timestamp <= events[i].timestamp);
            if (events[i].modality != Modality::kEmail) CHECK(events[i].attachment_count == 0);
        }
        // The daily logon/logoff ritual puts >= 2 events into every day.
        std::set<std::int64_t> days;
        for (const AuditEvent& e : events) days.insert((e.timestamp - kBase) / 86400);
        CHECK(days.size() == std::size_t(cfg.n_days));
    }
}

TEST_CASE("intervals are day-aligned, in bounds, on distinct users") {
    const GeneratorConfig cfg = small_config();
    const GeneratedCorpus corpus = generate_corpus(cfg);

    REQUIRE(corpus.truth.size() == 4);
    std::set<std::string> users;
    int n_s1 = 0, n_s3 = 0;
    for (const AttackInterval& iv : corpus.truth) {
        users.insert(iv.user);
        CHECK((iv.start - kBase) % 86400 == 0);
        CHECK((iv.end - iv.start) % 86400 == 0);
        const std::int64_t start_day = (iv.start - kBase) / 86400;
        const std::int64_t len_days = (iv.end - iv.start) / 86400;
        CHECK(start_day >= cfg.attack_min_day);
        CHECK(start_day <= cfg.attack_max_day);
        if (iv.scenario == 1) {
            ++n_s1;
            CHECK(len_days >= 2);
            CHECK(len_days <= 3);
        } else {
            REQUIRE(iv.scenario == 3);
            ++n_s3;
            CHECK(len_days >= 4);
            CHECK(len_days <= 5);
        }
    }
    CHECK(users.size() == 4);  // distinct users per campaign
    CHECK(n_s1 == 2);
    CHECK(n_s3 == 2);
}

TEST_CASE("injected events equal the multiset diff against an attack-free run") {
    const GeneratorConfig cfg = small_config();
    GeneratorConfig benign_cfg = cfg;
    benign_cfg.attacks.clear();

    const GeneratedCorpus full = generate_corpus(cfg);
    const GeneratedCorpus benign = generate_corpus(benign_cfg);
    CHECK(benign.truth.empty());

    std::set<std::string> attacked;
    for (const AttackInterval& iv : full.truth) attacked.insert(iv.user);

    for (const auto& [user, events] : full.streams) {
        const std::vector<AuditEvent>& base = benign.streams.at(user);
        if (attacked.count(user) == 0) {
            // Normal activity is untouched by the attack config.
            CHECK(events == base);
            continue;
        }
        // Baseline is a sub-multiset: nothing benign was removed or moved.
        CHECK(multiset_diff(base, events).empty());

        const std::vector<AuditEvent> injected = multiset_diff(events, base);
        REQUIRE(!injected.empty());

        const AttackInterval* iv = nullptr;
        for (const AttackInterval& cand : full.truth) {
            if (cand.user == user) iv = &cand;
        }
        REQUIRE(iv != nullptr);

        std::set<std::int64_t> active_days;
        for (const AuditEvent& e : injected) {
            CHECK(e.timestamp >= iv->start);
            CHECK(e.timestamp < iv->end);
            active_days.insert((e.timestamp - iv->start) / 86400);
            const int hour = hour_of_day(e.timestamp);
            if (iv->scenario == 1) {
                // Night logons plus evening mail to outside recipients.
                if (e.modality == Modality::kLogon) {
                    CHECK(e.action == Action::kLogon);
                    CHECK(hour <= 5);
                } else {
                    REQUIRE(e.modality == Modality::kEmail);
                    CHECK(hour >= 19);
                    CHECK(e.entity.find("@corp.example.com") == std::string::npos);
                    CHECK(e.attachment_count >= 1);
                    CHECK(e.attachment_count <= 2);
                }
            } else {
                // Evening device and file bursts.
                CHECK((e.modality == Modality::kDevice || e.modality == Modality::kFile));
                CHECK(hour >= 18);
                if (e.modality == Modality::kFile) {
                    CHECK(e.entity.rfind("exfil_", 0) == 0);
                }
            }
        }
        if (iv->scenario == 1) {
            // Scenario 1 touches every campaign day.
            CHECK(active_days.size() == std::size_t((iv->end - iv->start) / 86400));
        } else {
            // Scenario 3 concentrates in 1-2 active days regardless of length.
            CHECK(active_days.size() >= 1);
            CHECK(active_days.size() <= 2);
        }
    }
}

TEST_CASE("config validation rejects out-of-contract settings") {
    auto expect_config_error = [](void (*mutate)(GeneratorConfig&)) {
        GeneratorConfig cfg = small_config();
        mutate(cfg);
        CHECK_THROWS_AS(generate_corpus(cfg), ConfigError);
    };

    expect_config_error([](GeneratorConfig& c) { c.n_users = 0; });
    expect_config_error([](GeneratorConfig& c) { c.n_days = 0; });
    expect_config_error([](GeneratorConfig& c) { c.rate_http = -0.1; });
    expect_config_error([](GeneratorConfig& c) { c.work_end_hour = c.work_start_hour; });
    expect_config_error([](GeneratorConfig& c) { c.work_end_hour = 25; });
    expect_config_error([](GeneratorConfig& c) { c.burst_prob = 1.5; });
    expect_config_error([](GeneratorConfig& c) { c.owl_evening_prob = -0.2; });
    expect_config_error([](GeneratorConfig& c) { c.burst_factor_min = 0.5; });
    expect_config_error([](GeneratorConfig& c) { c.burst_factor_max = 2.0; c.burst_factor_min = 3.0; });
    expect_config_error([](GeneratorConfig& c) { c.attacks[0].scenario = 2; });
    expect_config_error([](GeneratorConfig& c) { c.attacks[0].min_days = 1; });
    expect_config_error([](GeneratorConfig& c) { c.attacks[1].max_days = 7; });
    expect_config_error([](GeneratorConfig& c) { c.attacks[0].intensity = 0.0; });
    expect_config_error([](GeneratorConfig& c) { c.attack_max_day = 38; });   // 38 + 5 > 40
    expect_config_error([](GeneratorConfig& c) { c.attack_min_day = 31; });   // min > max
    expect_config_error([](GeneratorConfig& c) { c.attacks[0].n_campaigns = 5; });  // 7 > 6 users
}

TEST_CASE("desk_default shape matches its documentation") {
    const GeneratorConfig cfg = GeneratorConfig::desk_default();
    CHECK(cfg.n_users == 20);
    CHECK(cfg.n_days == 120);
    REQUIRE(cfg.attacks.size() == 2);
    CHECK(cfg.attacks[0].scenario == 1);
    CHECK(cfg.attacks[0].n_campaigns == 5);
    CHECK(cfg.attacks[1].scenario == 3);
    CHECK(cfg.attacks[1].n_campaigns == 4);
    CHECK(cfg.attacks[0].n_campaigns + cfg.attacks[1].n_campaigns >= 6);
}

}  // TEST_SUITE
