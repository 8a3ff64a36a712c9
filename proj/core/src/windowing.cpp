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

#include "ueba/windowing.hpp"

#include "ueba/common.hpp"
#include "ueba/csv.hpp"
#include "ueba/timeutil.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace ueba {

namespace {

const char* const kFeatureNames[kFeatureCount] = {
    "logon_count",        "logoff_count",           "unique_pcs",
    "device_connect_count", "device_disconnect_count", "file_access_count",
    "unique_files",       "email_send_count",       "unique_recipients",
    "attachment_total",   "http_count",             "unique_domains",
};

/// Per-bucket accumulator; unique-entity sets make feature extraction
/// invariant to event order within the bucket.
struct BucketAcc {
    double counts[kFeatureCount] = {};
    std::set<std::string> pcs;
    std::set<std::string> files;
    std::set<std::string> recipients;
    std::set<std::string> domains;
};

}  // namespace

const char* feature_name(int f) {
    if (f < 0 || f >= kFeatureCount) throw ConfigError("feature index out of range");
    return kFeatureNames[f];
}

void WindowConfig::validate() const {
    if (window_hours <= 0 || bucket_hours <= 0 || window_hours % bucket_hours != 0) {
        throw ConfigError("window config: window_hours must be a positive multiple of "
                          "bucket_hours");
    }
}

void SplitConfig::validate() const {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw ConfigError("split config: train_fraction must be in (0, 1)");
    }
    if (buffer_hours < 0) {
        throw ConfigError("split config: buffer_hours must be >= 0");
    }
    if (min_train_windows < 1) {
        throw ConfigError("split config: min_train_windows must be >= 1");
    }
}

MaskValue decompose(const Matrix& x) {
    MaskValue out;
    out.m = Matrix(x.rows, x.cols);
    out.v = x;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        if (x.data[i] < 0.0) {
            throw DataContractError("decompose: negative feature value (extraction bug)");
        }
        out.m.data[i] = x.data[i] > 0.0 ? 1.0 : 0.0;
    }
    return out;
}

WindowBuildResult build_windows(const EventStreams& events, const WindowConfig& cfg,
                                const std::vector<AttackInterval>& truth) {
    cfg.validate();
    const std::int64_t w_sec = static_cast<std::int64_t>(cfg.window_hours) * kSecondsPerHour;
    const std::int64_t b_sec = static_cast<std::int64_t>(cfg.bucket_hours) * kSecondsPerHour;
    const int t_buckets = cfg.t();

    std::map<std::string, std::vector<const AttackInterval*>> truth_by_user;
    for (const AttackInterval& iv : truth) truth_by_user[iv.user].push_back(&iv);

    WindowBuildResult out;
    for (const auto& [user, stream] : events) {
        if (stream.empty()) {
            out.warnings.push_back("user '" + user + "' has zero events; no windows built");
            continue;
        }
        const std::int64_t base = floor_to_day(stream.front().timestamp);
        const std::int64_t span = stream.back().timestamp - base;
        const std::int64_t n_windows = span / w_sec + 1;

        // accs[window][bucket]
        std::vector<std::vector<BucketAcc>> accs(
            static_cast<std::size_t>(n_windows),
            std::vector<BucketAcc>(static_cast<std::size_t>(t_buckets)));

        for (const AuditEvent& e : stream) {
            if (e.timestamp < base) {
                throw DataContractError("build_windows: events for user '" + user +
                                        "' are not sorted");
            }
            const std::int64_t off = e.timestamp - base;
            BucketAcc& acc = accs[static_cast<std::size_t>(off / w_sec)]
                                 [static_cast<std::size_t>((off % w_sec) / b_sec)];
            switch (e.modality) {
                case Modality::kLogon:
                    acc.counts[e.action == Action::kLogon ? kLogonCount : kLogoffCount] += 1;
                    acc.pcs.insert(e.entity);
                    break;
                case Modality::kDevice:
                    acc.counts[e.action == Action::kConnect ? kDeviceConnectCount
                                                            : kDeviceDisconnectCount] += 1;
                    break;
                case Modality::kFile:
                    acc.counts[kFileAccessCount] += 1;
                    acc.files.insert(e.entity);
                    break;
                case Modality::kEmail:
                    acc.counts[kEmailSendCount] += 1;
                    acc.counts[kAttachmentTotal] += e.attachment_count;
                    acc.recipients.insert(e.entity);
                    break;
                case Modality::kHttp:
                    acc.counts[kHttpCount] += 1;
                    acc.domains.insert(e.entity);
                    break;
            }
        }

        const auto it = truth_by_user.find(user);
        for (std::int64_t w = 0; w < n_windows; ++w) {
            WindowSample s;
            s.user = user;
            s.window_start = base + w * w_sec;
            s.window_hours = cfg.window_hours;
            const std::int64_t window_end = s.window_start + w_sec;

            s.x = Matrix(t_buckets, kFeatureCount);
            for (int t = 0; t < t_buckets; ++t) {
                BucketAcc& acc = accs[static_cast<std::size_t>(w)][static_cast<std::size_t>(t)];
                acc.counts[kUniquePcs] = static_cast<double>(acc.pcs.size());
                acc.counts[kUniqueFiles] = static_cast<double>(acc.files.size());
                acc.counts[kUniqueRecipients] = static_cast<double>(acc.recipients.size());
                acc.counts[kUniqueDomains] = static_cast<double>(acc.domains.size());
                for (int f = 0; f < kFeatureCount; ++f) {
                    s.x.at(t, f) = acc.counts[f];
                }
            }
            MaskValue mv = decompose(s.x);
            s.m = std::move(mv.m);
            s.v = std::move(mv.v);

            if (it != truth_by_user.end()) {
                for (const AttackInterval* iv : it->second) {
                    if (iv->start < window_end && iv->end > s.window_start) {
                        s.malicious = true;
                        s.scenario = iv->scenario;
                        break;  // intervals are sorted; first overlap wins
                    }
                }
            }
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

NormStats compute_norm_stats(const std::vector<WindowSample>& train) {
    if (train.empty()) {
        throw DataContractError("compute_norm_stats: empty training set");
    }
    NormStats stats;
    stats.mean.assign(kFeatureCount, 0.0);
    stats.stdev.assign(kFeatureCount, 0.0);

    std::int64_t cells_per_feature = 0;
    for (const WindowSample& s : train) cells_per_feature += s.v.rows;

    for (int f = 0; f < kFeatureCount; ++f) {
        double sum = 0.0;
        for (const WindowSample& s : train) {
            for (int t = 0; t < s.v.rows; ++t) sum += s.v.at(t, f);
        }
        const double mean = sum / static_cast<double>(cells_per_feature);
        double sq = 0.0;
        for (const WindowSample& s : train) {
            for (int t = 0; t < s.v.rows; ++t) {
                const double d = s.v.at(t, f) - mean;
                sq += d * d;
            }
        }
        stats.mean[f] = mean;
        stats.stdev[f] =
            std::max(std::sqrt(sq / static_cast<double>(cells_per_feature)), NormStats::kStdFloor);
    }
    stats.source = "train(n=" + std::to_string(train.size()) + ")";
    return stats;
}

Matrix apply_norm(const Matrix& v, const NormStats& stats) {
    if (v.cols != static_cast<int>(stats.mean.size()) ||
        stats.mean.size() != stats.stdev.size()) {
        throw DataContractError("apply_norm: stats dimension mismatch");
    }
    Matrix out(v.rows, v.cols);
    for (int t = 0; t < v.rows; ++t) {
        for (int f = 0; f < v.cols; ++f) {
            out.at(t, f) = (v.at(t, f) - stats.mean[f]) / stats.stdev[f];
        }
    }
    return out;
}

SplitResult chronological_split(const std::vector<WindowSample>& windows,
                                const std::vector<AttackInterval>& truth,
                                const SplitConfig& cfg) {
    cfg.validate();

    std::map<std::string, std::int64_t> first_attack;
    for (const AttackInterval& iv : truth) {
        auto [it, inserted] = first_attack.emplace(iv.user, iv.start);
        if (!inserted) it->second = std::min(it->second, iv.start);
    }

    std::map<std::string, std::vector<const WindowSample*>> by_user;
    for (const WindowSample& s : windows) by_user[s.user].push_back(&s);

    SplitResult out;
    for (auto& [user, samples] : by_user) {
        std::sort(samples.begin(), samples.end(),
                  [](const WindowSample* a, const WindowSample* b) {
                      return a->window_start < b->window_start;
                  });

        bool has_cutoff = false;
        std::int64_t cutoff = 0;
        if (const auto it = first_attack.find(user); it != first_attack.end()) {
            has_cutoff = true;
            cutoff = it->second - static_cast<std::int64_t>(cfg.buffer_hours) * kSecondsPerHour;
        }

        // Half-open windows: end == cutoff means all activity precedes the
        // buffer zone, so such windows stay eligible.
        std::vector<const WindowSample*> eligible;
        for (const WindowSample* s : samples) {
            if (s->malicious) continue;
            if (has_cutoff && s->window_end() > cutoff) continue;
            eligible.push_back(s);
        }
        if (static_cast<int>(eligible.size()) < cfg.min_train_windows) {
            out.warnings.push_back("user '" + user + "' excluded: only " +
                                   std::to_string(eligible.size()) +
                                   " pre-attack normal windows (need >= " +
                                   std::to_string(cfg.min_train_windows) + ")");
            continue;
        }

        const std::size_t n_train = static_cast<std::size_t>(
            std::floor(cfg.train_fraction * static_cast<double>(eligible.size())));
        std::set<const WindowSample*> train_set(eligible.begin(),
                                                eligible.begin() + static_cast<std::ptrdiff_t>(n_train));
        for (const WindowSample* s : samples) {
            if (train_set.count(s)) {
                out.train.push_back(*s);
            } else {
                out.test.push_back(*s);
            }
        }
    }
    return out;
}

void write_windows_csv(const std::vector<WindowSample>& samples, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write windows dump '" + path + "'");

    std::vector<std::string> header = {"user", "window_start", "bucket", "label", "scenario"};
    for (int f = 0; f < kFeatureCount; ++f) header.push_back(kFeatureNames[f]);
    out << join_csv(header) << "\n";

    for (const WindowSample& s : samples) {
        for (int t = 0; t < s.x.rows; ++t) {
            std::vector<std::string> row = {
                s.user,
                format_timestamp(s.window_start, kDefaultTimestampFormat),
                std::to_string(t),
                s.malicious ? "malicious" : "normal",
                std::to_string(s.scenario),
            };
            for (int f = 0; f < kFeatureCount; ++f) {
                row.push_back(format_double(s.x.at(t, f)));
            }
            out << join_csv(row) << "\n";
        }
    }
}

}  // namespace ueba
