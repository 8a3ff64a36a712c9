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
#include "ueba/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ueba {

/// Fixed behavioral feature layout: column f of every T x F window matrix.
enum Feature : int {
    kLogonCount = 0,
    kLogoffCount = 1,
    kUniquePcs = 2,
    kDeviceConnectCount = 3,
    kDeviceDisconnectCount = 4,
    kFileAccessCount = 5,
    kUniqueFiles = 6,
    kEmailSendCount = 7,
    kUniqueRecipients = 8,
    kAttachmentTotal = 9,
    kHttpCount = 10,
    kUniqueDomains = 11,
};
constexpr int kFeatureCount = 12;
const char* feature_name(int f);

struct WindowConfig {
    int window_hours = 24;  // W
    int bucket_hours = 1;   // bucket width; W must be divisible by it

    int t() const { return window_hours / bucket_hours; }
    void validate() const;
};

struct WindowSample {
    std::string user;
    std::int64_t window_start = 0;
    int window_hours = 0;  // span; window covers [start, start + hours)
    Matrix x;  // T x F raw counts
    Matrix m;  // binary activity mask: m(t,f) = 1 iff x(t,f) > 0
    Matrix v;  // value channel; equal to x until normalization is applied
    bool malicious = false;
    int scenario = 0;  // 0 when normal

    std::int64_t window_end() const {
        return window_start + static_cast<std::int64_t>(window_hours) * 3600;
    }
};

struct NormStats {
    std::vector<double> mean;  // length F
    std::vector<double> stdev;  // length F, floored at 1e-6
    std::string source;

    static constexpr double kStdFloor = 1e-6;
};

struct SplitConfig {
    double train_fraction = 0.8;
    int buffer_hours = 48;
    int min_train_windows = 5;  // users below this are excluded entirely

    void validate() const;
};

struct WindowBuildResult {
    std::vector<WindowSample> samples;  // sorted by (user, window_start)
    std::vector<std::string> warnings;  // e.g. users with zero events
};

/// Partitions each user's span into consecutive W-hour windows aligned to the
/// UTC midnight of the user's first event day, computes the 12 features per
/// bucket, and labels windows by any-overlap with attack intervals. Windows
/// with zero activity are retained.
WindowBuildResult build_windows(const EventStreams& events, const WindowConfig& cfg,
                                const std::vector<AttackInterval>& truth);

struct MaskValue {
    Matrix m;
    Matrix v;
};

/// M(t,f) = 1 iff X(t,f) > 0; V = X. A negative entry is a feature-extraction
/// bug and is fatal.
MaskValue decompose(const Matrix& x);

/// Per-feature mean and population std over every cell of every training
/// window; std floored at 1e-6.
NormStats compute_norm_stats(const std::vector<WindowSample>& train);

/// Returns (V - mean) / std per feature column. The mask channel is never
/// normalized.
Matrix apply_norm(const Matrix& v, const NormStats& stats);

struct SplitResult {
    std::vector<WindowSample> train;
    std::vector<WindowSample> test;
    std::vector<std::string> warnings;  // excluded users
};

/// Per user: normal windows ending at or before (first attack start -
/// buffer) are eligible; the earliest train_fraction of them go to train and
/// everything else goes to test. A user with no attack interval has every
/// normal window eligible. Users with fewer than min_train_windows eligible
/// windows are dropped with a warning. Train never contains a malicious
/// window and per user strictly precedes test.
SplitResult chronological_split(const std::vector<WindowSample>& windows,
                                const std::vector<AttackInterval>& truth,
                                const SplitConfig& cfg);

/// One row per (user, window_start, bucket) with the 12 feature columns.
void write_windows_csv(const std::vector<WindowSample>& samples, const std::string& path);

}  // namespace ueba
