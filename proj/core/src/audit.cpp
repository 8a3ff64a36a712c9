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

#include "ueba/audit.hpp"

#include "ueba/common.hpp"
#include "ueba/csv.hpp"
#include "ueba/timeutil.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

namespace ueba {

namespace {

constexpr std::int64_t kMinCampaignSeconds = kSecondsPerDay;      // exclusive bound
constexpr std::int64_t kMaxCampaignSeconds = 7 * kSecondsPerDay;  // exclusive bound

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_int(const std::string& text, std::int64_t& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string basename_of(const std::string& path) {
    return std::filesystem::path(path).filename().string();
}

std::tuple<std::string, std::string, std::string, int> sort_key(const AuditEvent& e) {
    return {modality_name(e.modality), e.entity, action_name(e.action), e.attachment_count};
}

struct RowContext {
    const std::string& file;
    std::size_t line;
    ParseReport& report;

    void reject(const std::string& reason) {
        ++report.rows_rejected;
        report.rejects.push_back(file + ":" + std::to_string(line) + ": " + reason);
    }
};

}  // namespace

const char* modality_name(Modality m) {
    switch (m) {
        case Modality::kLogon: return "logon";
        case Modality::kDevice: return "device";
        case Modality::kFile: return "file";
        case Modality::kEmail: return "email";
        case Modality::kHttp: return "http";
    }
    return "?";
}

const char* action_name(Action a) {
    switch (a) {
        case Action::kLogon: return "logon";
        case Action::kLogoff: return "logoff";
        case Action::kConnect: return "connect";
        case Action::kDisconnect: return "disconnect";
        case Action::kAccess: return "access";
        case Action::kSend: return "send";
        case Action::kVisit: return "visit";
    }
    return "?";
}

bool action_valid_for(Modality m, Action a) {
    switch (m) {
        case Modality::kLogon: return a == Action::kLogon || a == Action::kLogoff;
        case Modality::kDevice: return a == Action::kConnect || a == Action::kDisconnect;
        case Modality::kFile: return a == Action::kAccess;
        case Modality::kEmail: return a == Action::kSend;
        case Modality::kHttp: return a == Action::kVisit;
    }
    return false;
}

std::string url_domain(const std::string& url) {
    std::string s = trim(url);
    if (const auto scheme = s.find("://"); scheme != std::string::npos) {
        s = s.substr(scheme + 3);
    }
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        s = s.substr(0, slash);
    }
    if (const auto at = s.find('@'); at != std::string::npos) {
        s = s.substr(at + 1);
    }
    if (const auto colon = s.find(':'); colon != std::string::npos) {
        s = s.substr(0, colon);
    }
    return lower(s);
}

ParsedEvents parse_events(const std::vector<std::string>& paths, const IngestSchema& schema) {
    ParsedEvents out;
    for (const std::string& path : paths) {
        const std::string base = basename_of(path);
        Modality modality;
        if (base == "logon.csv") {
            modality = Modality::kLogon;
        } else if (base == "device.csv") {
            modality = Modality::kDevice;
        } else if (base == "file.csv") {
            modality = Modality::kFile;
        } else if (base == "email.csv") {
            modality = Modality::kEmail;
        } else if (base == "http.csv") {
            modality = Modality::kHttp;
        } else {
            throw ConfigError("unknown modality file '" + base +
                              "' (expected logon/device/file/email/http .csv)");
        }

        CsvReader reader(path);
        while (reader.next_row()) {
            ++out.report.rows_total;
            RowContext ctx{base, reader.line_number(), out.report};

            AuditEvent e;
            e.modality = modality;
            e.user = trim(reader.field(schema.user_col));
            if (e.user.empty()) {
                ctx.reject("missing user");
                continue;
            }
            const std::string& raw_ts = reader.field(schema.time_col);
            const auto ts = parse_timestamp(raw_ts, schema.timestamp_format);
            if (!ts || *ts <= 0) {
                ctx.reject("unparseable timestamp '" + raw_ts + "'");
                continue;
            }
            e.timestamp = *ts;

            switch (modality) {
                case Modality::kLogon: {
                    const std::string act = lower(trim(reader.field(schema.activity_col)));
                    if (act == "logon") {
                        e.action = Action::kLogon;
                    } else if (act == "logoff") {
                        e.action = Action::kLogoff;
                    } else {
                        ctx.reject("unknown logon activity '" + act + "'");
                        continue;
                    }
                    e.entity = trim(reader.field(schema.pc_col));
                    break;
                }
                case Modality::kDevice: {
                    const std::string act = lower(trim(reader.field(schema.activity_col)));
                    if (act == "connect") {
                        e.action = Action::kConnect;
                    } else if (act == "disconnect") {
                        e.action = Action::kDisconnect;
                    } else {
                        ctx.reject("unknown device activity '" + act + "'");
                        continue;
                    }
                    e.entity = trim(reader.field(schema.pc_col));
                    break;
                }
                case Modality::kFile: {
                    e.action = Action::kAccess;
                    e.entity = trim(reader.field(schema.filename_col));
                    break;
                }
                case Modality::kEmail: {
                    e.action = Action::kSend;
                    // The recipient list is semicolon-separated; the first
                    // address is the entity used for unique-recipient stats.
                    std::string to = trim(reader.field(schema.to_col));
                    if (const auto semi = to.find(';'); semi != std::string::npos) {
                        to = trim(to.substr(0, semi));
                    }
                    e.entity = to;
                    const std::string att = trim(reader.field(schema.attachments_col));
                    if (att.empty()) {
                        e.attachment_count = 0;
                    } else {
                        std::int64_t n = 0;
                        if (!parse_int(att, n) || n < 0) {
                            ctx.reject("bad attachment count '" + att + "'");
                            continue;
                        }
                        e.attachment_count = static_cast<int>(n);
                    }
                    break;
                }
                case Modality::kHttp: {
                    e.action = Action::kVisit;
                    e.entity = url_domain(reader.field(schema.url_col));
                    break;
                }
            }
            out.streams[e.user].push_back(std::move(e));
        }
    }

    // Deterministic merged order regardless of the order files were read in.
    for (auto& [user, events] : out.streams) {
        std::stable_sort(events.begin(), events.end(),
                         [](const AuditEvent& a, const AuditEvent& b) {
                             if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                             return sort_key(a) < sort_key(b);
                         });
    }
    return out;
}

GroundTruth parse_ground_truth(const std::string& path, const IngestSchema& schema) {
    GroundTruth out;
    CsvReader reader(path);
    while (reader.next_row()) {
        const std::string where = basename_of(path) + ":" + std::to_string(reader.line_number());

        AttackInterval iv;
        iv.user = trim(reader.field("user"));
        std::int64_t scenario = 0;
        if (iv.user.empty() || !parse_int(reader.field("scenario"), scenario) || scenario < 1) {
            out.rejects.push_back(where + ": malformed user/scenario");
            continue;
        }
        iv.scenario = static_cast<int>(scenario);
        const auto start = parse_timestamp(reader.field("start"), schema.timestamp_format);
        const auto end = parse_timestamp(reader.field("end"), schema.timestamp_format);
        if (!start || !end) {
            out.rejects.push_back(where + ": unparseable interval timestamp");
            continue;
        }
        iv.start = *start;
        iv.end = *end;
        if (iv.start >= iv.end) {
            out.rejects.push_back(where + ": start >= end");
            continue;
        }
        const std::int64_t duration = iv.end - iv.start;
        if (duration <= kMinCampaignSeconds) {
            out.rejects.push_back(where + ": below 1-day minimum");
            continue;
        }
        if (duration >= kMaxCampaignSeconds) {
            out.rejects.push_back(where + ": above 7-day maximum");
            continue;
        }
        out.intervals.push_back(std::move(iv));
    }
    std::sort(out.intervals.begin(), out.intervals.end(),
              [](const AttackInterval& a, const AttackInterval& b) {
                  if (a.user != b.user) return a.user < b.user;
                  if (a.start != b.start) return a.start < b.start;
                  return a.end < b.end;
              });
    return out;
}

EventStreams filter_compromised_users(const EventStreams& streams,
                                      const std::vector<AttackInterval>& truth) {
    std::set<std::string> compromised;
    for (const AttackInterval& iv : truth) compromised.insert(iv.user);

    EventStreams out;
    for (const auto& [user, events] : streams) {
        if (compromised.count(user)) out[user] = events;
    }
    if (out.empty()) {
        throw DataContractError(
            "no compromised users found: event streams and ground truth are disjoint");
    }
    return out;
}

std::vector<std::string> corpus_event_paths(const std::string& dir) {
    std::vector<std::string> out;
    for (const char* name : {"logon.csv", "device.csv", "file.csv", "email.csv", "http.csv"}) {
        out.push_back((std::filesystem::path(dir) / name).string());
    }
    return out;
}

void write_corpus(const EventStreams& streams, const std::vector<AttackInterval>& truth,
                  const std::string& dir, const IngestSchema& schema) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    }

    // Global time order per file, mirroring how audit exports are laid out.
    std::vector<const AuditEvent*> all;
    for (const auto& [user, events] : streams) {
        for (const AuditEvent& e : events) all.push_back(&e);
    }
    std::sort(all.begin(), all.end(), [](const AuditEvent* a, const AuditEvent* b) {
        if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
        if (a->user != b->user) return a->user < b->user;
        return sort_key(*a) < sort_key(*b);
    });

    auto open = [&](const char* name, const std::vector<std::string>& header) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw ConfigError(std::string("cannot write ") + name + " under '" + dir + "'");
        out << join_csv(header) << "\n";
        return out;
    };
    auto cap = [](std::string s) {
        if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
        return s;
    };

    std::ofstream logon = open("logon.csv", {"id", schema.time_col, schema.user_col,
                                             schema.pc_col, schema.activity_col});
    std::ofstream device = open("device.csv", {"id", schema.time_col, schema.user_col,
                                               schema.pc_col, schema.activity_col});
    std::ofstream file = open("file.csv", {"id", schema.time_col, schema.user_col, schema.pc_col,
                                           schema.filename_col});
    std::ofstream email = open("email.csv", {"id", schema.time_col, schema.user_col,
                                             schema.pc_col, schema.to_col,
                                             schema.attachments_col});
    std::ofstream http = open("http.csv", {"id", schema.time_col, schema.user_col, schema.pc_col,
                                           schema.url_col});

    std::int64_t next_id = 1;
    for (const AuditEvent* e : all) {
        const std::string id = "{E" + std::to_string(next_id++) + "}";
        const std::string date = format_timestamp(e->timestamp, schema.timestamp_format);
        const std::string host_pc = "PC-" + e->user;  // placeholder host for non-logon rows
        switch (e->modality) {
            case Modality::kLogon:
                logon << join_csv({id, date, e->user, e->entity, cap(action_name(e->action))})
                      << "\n";
                break;
            case Modality::kDevice:
                device << join_csv({id, date, e->user, e->entity, cap(action_name(e->action))})
                       << "\n";
                break;
            case Modality::kFile:
                file << join_csv({id, date, e->user, host_pc, e->entity}) << "\n";
                break;
            case Modality::kEmail:
                email << join_csv({id, date, e->user, host_pc, e->entity,
                                   std::to_string(e->attachment_count)})
                      << "\n";
                break;
            case Modality::kHttp:
                http << join_csv({id, date, e->user, host_pc, "http://" + e->entity + "/"})
                     << "\n";
                break;
        }
    }

    std::ofstream gt = open("ground_truth.csv", {"user", "scenario", "start", "end"});
    std::vector<AttackInterval> sorted_truth = truth;
    std::sort(sorted_truth.begin(), sorted_truth.end(),
              [](const AttackInterval& a, const AttackInterval& b) {
                  if (a.user != b.user) return a.user < b.user;
                  if (a.start != b.start) return a.start < b.start;
                  return a.end < b.end;
              });
    for (const AttackInterval& iv : sorted_truth) {
        gt << join_csv({iv.user, std::to_string(iv.scenario),
                        format_timestamp(iv.start, schema.timestamp_format),
                        format_timestamp(iv.end, schema.timestamp_format)})
           << "\n";
    }
}

}  // namespace ueba
