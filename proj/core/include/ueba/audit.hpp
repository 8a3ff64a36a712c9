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
#include <map>
#include <string>
#include <vector>

namespace ueba {

/// The five audit modalities. Each maps to one input CSV file.
enum class Modality { kLogon, kDevice, kFile, kEmail, kHttp };

/// Modality-specific action tag.
enum class Action { kLogon, kLogoff, kConnect, kDisconnect, kAccess, kSend, kVisit };

const char* modality_name(Modality m);
const char* action_name(Action a);
bool action_valid_for(Modality m, Action a);

struct AuditEvent {
    std::string user;
    std::int64_t timestamp = 0;  // epoch seconds UTC, strictly positive
    Modality modality = Modality::kLogon;
    Action action = Action::kLogon;
    // Opaque id used for unique-entity statistics: pc for logon/device,
    // filename for file, first recipient for email, url domain for http.
    std::string entity;
    int attachment_count = 0;  // email only; 0 for every other modality

    friend bool operator==(const AuditEvent& a, const AuditEvent& b) {
        return a.user == b.user && a.timestamp == b.timestamp && a.modality == b.modality &&
               a.action == b.action && a.entity == b.entity &&
               a.attachment_count == b.attachment_count;
    }
};

struct AttackInterval {
    std::string user;
    int scenario = 0;  // 1 or 3
    std::int64_t start = 0;
    std::int64_t end = 0;
};

/// Column mapping for CERT-style CSV exports. Defaults match the common
/// r4.2 layout; every name is overridable through the run config.
struct IngestSchema {
    std::string timestamp_format = "%m/%d/%Y %H:%M:%S";
    std::string time_col = "date";
    std::string user_col = "user";
    std::string activity_col = "activity";  // logon + device files
    std::string pc_col = "pc";
    std::string filename_col = "filename";
    std::string to_col = "to";
    std::string attachments_col = "attachments";
    std::string url_col = "url";

    static IngestSchema cert_default() { return IngestSchema{}; }
};

/// Per-user event streams, each sorted by (timestamp, modality, entity, action).
using EventStreams = std::map<std::string, std::vector<AuditEvent>>;

struct ParseReport {
    std::int64_t rows_total = 0;
    std::int64_t rows_rejected = 0;
    std::vector<std::string> rejects;  // "<file>:<line>: <reason>" per rejected row
};

struct ParsedEvents {
    EventStreams streams;
    ParseReport report;
};

/// Parses any subset of the five modality files. A path whose basename is not
/// one of logon.csv/device.csv/file.csv/email.csv/http.csv is fatal; a missing
/// file is fatal; malformed rows are rejected and reported, never dropped
/// silently.
ParsedEvents parse_events(const std::vector<std::string>& paths, const IngestSchema& schema);

struct GroundTruth {
    std::vector<AttackInterval> intervals;  // sorted by (user, start)
    std::vector<std::string> rejects;       // diagnostics for excluded rows
};

/// Reads user,scenario,start,end rows. Intervals must last strictly more than
/// one day and strictly less than seven; violators are excluded and reported.
GroundTruth parse_ground_truth(const std::string& path, const IngestSchema& schema);

/// Extracts the url domain the way the http ingester does (host part,
/// scheme/path/port stripped). Exposed for tests.
std::string url_domain(const std::string& url);

/// Keeps exactly the users that appear in >= 1 retained interval.
EventStreams filter_compromised_users(const EventStreams& streams,
                                      const std::vector<AttackInterval>& truth);

/// Writes streams back out as the five CERT-style CSVs plus ground_truth.csv.
/// Reparsing the written directory yields an identical event multiset.
void write_corpus(const EventStreams& streams, const std::vector<AttackInterval>& truth,
                  const std::string& dir, const IngestSchema& schema);

/// Paths of the five modality files under dir, in fixed modality order.
std::vector<std::string> corpus_event_paths(const std::string& dir);

}  // namespace ueba
