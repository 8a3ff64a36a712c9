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

#include "ueba/pipeline.hpp"

#include "ueba/common.hpp"
#include "ueba/csv.hpp"
#include "ueba/timeutil.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <set>
#include <sstream>
#include <utility>

namespace ueba {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad_config(const std::string& msg) {
    throw ConfigError("config: " + msg);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) {
            if (it.key() == a) {
                known = true;
                break;
            }
        }
        if (!known) bad_config("unknown key \"" + it.key() + "\" in " + where);
    }
}

const json* section(const json& root, const char* key, const std::string& where) {
    if (!root.contains(key)) return nullptr;
    const json& sec = root.at(key);
    if (!sec.is_object()) bad_config(where + "." + key + " must be an object");
    return &sec;
}

template <typename T>
void get_to(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        obj.at(key).get_to(out);
    } catch (const json::exception& e) {
        bad_config(std::string("bad value for ") + where + "." + key + ": " + e.what());
    }
}

void get_mode(const json& obj, const char* key, TrainMode& out, const std::string& where) {
    if (!obj.contains(key)) return;
    std::string name;
    get_to(obj, key, name, where);
    out = train_mode_from_name(name);
}

void get_variant(const json& obj, const char* key, ScoreVariant& out, const std::string& where) {
    if (!obj.contains(key)) return;
    std::string name;
    get_to(obj, key, name, where);
    out = score_variant_from_name(name);
}

void parse_generator(const json& sec, GeneratorConfig& g) {
    check_keys(sec, "generator",
               {"n_users", "n_days", "rate_logon", "rate_device", "rate_file", "rate_email",
                "rate_http", "work_start_hour", "work_end_hour", "burst_prob",
                "burst_factor_min", "burst_factor_max", "evening_prob", "owl_user_prob",
                "owl_evening_prob", "attack_min_day", "attack_max_day", "attacks"});
    get_to(sec, "n_users", g.n_users, "generator");
    get_to(sec, "n_days", g.n_days, "generator");
    get_to(sec, "rate_logon", g.rate_logon, "generator");
    get_to(sec, "rate_device", g.rate_device, "generator");
    get_to(sec, "rate_file", g.rate_file, "generator");
    get_to(sec, "rate_email", g.rate_email, "generator");
    get_to(sec, "rate_http", g.rate_http, "generator");
    get_to(sec, "work_start_hour", g.work_start_hour, "generator");
    get_to(sec, "work_end_hour", g.work_end_hour, "generator");
    get_to(sec, "burst_prob", g.burst_prob, "generator");
    get_to(sec, "burst_factor_min", g.burst_factor_min, "generator");
    get_to(sec, "burst_factor_max", g.burst_factor_max, "generator");
    get_to(sec, "evening_prob", g.evening_prob, "generator");
    get_to(sec, "owl_user_prob", g.owl_user_prob, "generator");
    get_to(sec, "owl_evening_prob", g.owl_evening_prob, "generator");
    get_to(sec, "attack_min_day", g.attack_min_day, "generator");
    get_to(sec, "attack_max_day", g.attack_max_day, "generator");
    if (sec.contains("attacks")) {
        const json& arr = sec.at("attacks");
        if (!arr.is_array()) bad_config("generator.attacks must be an array");
        g.attacks.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& a = arr.at(i);
            std::string where = "generator.attacks[" + std::to_string(i) + "]";
            if (!a.is_object()) bad_config(where + " must be an object");
            check_keys(a, where, {"scenario", "n_campaigns", "min_days", "max_days", "intensity"});
            AttackSpec spec;
            get_to(a, "scenario", spec.scenario, where);
            get_to(a, "n_campaigns", spec.n_campaigns, where);
            get_to(a, "min_days", spec.min_days, where);
            get_to(a, "max_days", spec.max_days, where);
            get_to(a, "intensity", spec.intensity, where);
            g.attacks.push_back(spec);
        }
    }
}

void parse_ingest(const json& sec, IngestSchema& s) {
    check_keys(sec, "ingest",
               {"timestamp_format", "time_col", "user_col", "activity_col", "pc_col",
                "filename_col", "to_col", "attachments_col", "url_col"});
    get_to(sec, "timestamp_format", s.timestamp_format, "ingest");
    get_to(sec, "time_col", s.time_col, "ingest");
    get_to(sec, "user_col", s.user_col, "ingest");
    get_to(sec, "activity_col", s.activity_col, "ingest");
    get_to(sec, "pc_col", s.pc_col, "ingest");
    get_to(sec, "filename_col", s.filename_col, "ingest");
    get_to(sec, "to_col", s.to_col, "ingest");
    get_to(sec, "attachments_col", s.attachments_col, "ingest");
    get_to(sec, "url_col", s.url_col, "ingest");
}

json attacks_to_json(const std::vector<AttackSpec>& attacks) {
    json arr = json::array();
    for (const AttackSpec& a : attacks) {
        json o;
        o["scenario"] = a.scenario;
        o["n_campaigns"] = a.n_campaigns;
        o["min_days"] = a.min_days;
        o["max_days"] = a.max_days;
        o["intensity"] = a.intensity;
        arr.push_back(o);
    }
    return arr;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw ConfigError("write failed: " + path);
}

void log_line(const std::string& stage, const std::string& msg) {
    std::cerr << "[" << stage << "] " << msg << "\n";
}

void log_warnings(const std::string& stage, const std::vector<std::string>& warnings,
                  std::size_t max_shown = 8) {
    for (std::size_t i = 0; i < warnings.size() && i < max_shown; ++i) {
        log_line(stage, "warning: " + warnings[i]);
    }
    if (warnings.size() > max_shown) {
        log_line(stage, "warning: (" + std::to_string(warnings.size() - max_shown) +
                            " more suppressed)");
    }
}

json stratum_to_json(const StratumMetrics& s) {
    json o;
    o["name"] = s.name;
    o["valid"] = s.valid;
    o["positives"] = s.positives;
    o["negatives"] = s.negatives;
    if (s.valid) {
        o["pr_auc"] = s.pr_auc;
        o["roc_auc"] = s.roc_auc;
    } else {
        o["pr_auc"] = nullptr;
        o["roc_auc"] = nullptr;
    }
    return o;
}

std::vector<LabeledScore> to_labeled(const std::vector<AnomalyScoreRecord>& records,
                                     ScoreVariant resolved) {
    std::vector<LabeledScore> items;
    items.reserve(records.size());
    for (const AnomalyScoreRecord& r : records) {
        LabeledScore ls;
        ls.score = selected_score(r, resolved);
        ls.label = r.malicious ? 1 : 0;
        ls.scenario = r.scenario;
        ls.user = r.user;
        items.push_back(std::move(ls));
    }
    return items;
}

/// Subset backing one stratum row: that scenario's positives plus every
/// negative. Mirrors stratified_report so the curve files match the report.
std::vector<LabeledScore> stratum_subset(const std::vector<LabeledScore>& items, int scenario) {
    std::vector<LabeledScore> sub;
    for (const LabeledScore& it : items) {
        if (it.label == 0 || it.scenario == scenario) sub.push_back(it);
    }
    return sub;
}

std::set<int> positive_scenarios(const std::vector<LabeledScore>& items) {
    std::set<int> out;
    for (const LabeledScore& it : items) {
        if (it.label == 1) out.insert(it.scenario);
    }
    return out;
}

bool stratum_has_both_classes(const std::vector<LabeledScore>& sub) {
    bool pos = false, neg = false;
    for (const LabeledScore& it : sub) (it.label == 1 ? pos : neg) = true;
    return pos && neg;
}

const StratumMetrics& find_stratum(const std::vector<StratumMetrics>& report,
                                   const std::string& name) {
    for (const StratumMetrics& s : report) {
        if (s.name == name) return s;
    }
    throw DataContractError("stratified report is missing the \"" + name + "\" row");
}

/// The emitted CSV must reproduce the reported numbers bit for bit; anything
/// else means the serialization lost information.
void self_check_scores(const std::vector<AnomalyScoreRecord>& records, const std::string& path,
                       ScoreVariant resolved, const std::vector<StratumMetrics>& report) {
    std::vector<AnomalyScoreRecord> reread = read_scores_csv(path);
    if (reread.size() != records.size()) {
        throw DataContractError("scores.csv round-trip changed the record count");
    }
    std::vector<LabeledScore> items = to_labeled(reread, resolved);
    const StratumMetrics& overall = find_stratum(report, "overall");
    if (overall.valid) {
        double ap = pr_auc(items);
        double roc = roc_auc(items);
        if (ap != overall.pr_auc || roc != overall.roc_auc) {
            throw DataContractError("scores.csv round-trip changed the metrics");
        }
    }
}

ModelParameters load_model_for(const RunConfig& cfg, const std::string& stage) {
    ModelParameters m = load_checkpoint(cfg.checkpoint_path());
    if (m.t() != cfg.window.t()) {
        throw ConfigError("checkpoint was trained with " + std::to_string(m.t()) +
                          " buckets per window but the config asks for " +
                          std::to_string(cfg.window.t()) +
                          "; align window.window_hours/bucket_hours with the checkpoint");
    }
    if (m.f != kFeatureCount) {
        throw DataContractError("checkpoint feature count " + std::to_string(m.f) +
                                " does not match this build (" +
                                std::to_string(kFeatureCount) + ")");
    }
    log_line(stage, "loaded " + cfg.checkpoint_path() + " (mode " +
                        train_mode_name(m.mode) + ", " + std::to_string(m.epochs_run) +
                        " epochs)");
    return m;
}

std::string runtime_csv_value(double seconds) {
    // Millisecond precision; full shortest-round-trip digits would only
    // pretend the clock is exact.
    double ms = std::round(seconds * 1000.0) / 1000.0;
    return format_double(ms);
}

}  // namespace

std::string RunConfig::checkpoint_path() const {
    return checkpoint.empty() ? out_dir + "/model.ckpt" : checkpoint;
}

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    cfg.generator = GeneratorConfig::desk_default();
    return cfg;
}

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": not valid JSON: " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be a JSON object");

    RunConfig cfg = RunConfig::defaults();
    check_keys(root, "top level",
               {"seed", "data_dir", "out_dir", "checkpoint", "min_precision", "sweep_hours",
                "filter_to_compromised", "dump_windows", "generator", "ingest", "window",
                "split", "arch", "loss", "train", "score", "sequence"});
    get_to(root, "seed", cfg.seed, "top level");
    get_to(root, "data_dir", cfg.data_dir, "top level");
    get_to(root, "out_dir", cfg.out_dir, "top level");
    get_to(root, "checkpoint", cfg.checkpoint, "top level");
    get_to(root, "min_precision", cfg.min_precision, "top level");
    get_to(root, "sweep_hours", cfg.sweep_hours, "top level");
    get_to(root, "filter_to_compromised", cfg.filter_to_compromised, "top level");
    get_to(root, "dump_windows", cfg.dump_windows, "top level");

    if (const json* sec = section(root, "generator", "top level")) {
        parse_generator(*sec, cfg.generator);
    }
    if (const json* sec = section(root, "ingest", "top level")) {
        parse_ingest(*sec, cfg.ingest);
    }
    if (const json* sec = section(root, "window", "top level")) {
        check_keys(*sec, "window", {"window_hours", "bucket_hours"});
        get_to(*sec, "window_hours", cfg.window.window_hours, "window");
        get_to(*sec, "bucket_hours", cfg.window.bucket_hours, "window");
    }
    if (const json* sec = section(root, "split", "top level")) {
        check_keys(*sec, "split", {"train_fraction", "buffer_hours", "min_train_windows"});
        get_to(*sec, "train_fraction", cfg.split.train_fraction, "split");
        get_to(*sec, "buffer_hours", cfg.split.buffer_hours, "split");
        get_to(*sec, "min_train_windows", cfg.split.min_train_windows, "split");
    }
    if (const json* sec = section(root, "arch", "top level")) {
        check_keys(*sec, "arch", {"latent_dim", "widths", "kernel", "leaky_slope"});
        get_to(*sec, "latent_dim", cfg.arch.latent_dim, "arch");
        get_to(*sec, "widths", cfg.arch.widths, "arch");
        get_to(*sec, "kernel", cfg.arch.kernel, "arch");
        get_to(*sec, "leaky_slope", cfg.arch.leaky_slope, "arch");
    }
    if (const json* sec = section(root, "loss", "top level")) {
        check_keys(*sec, "loss", {"pos_weight", "lambda_value", "lambda_temp"});
        get_to(*sec, "pos_weight", cfg.loss.pos_weight, "loss");
        get_to(*sec, "lambda_value", cfg.loss.lambda_value, "loss");
        get_to(*sec, "lambda_temp", cfg.loss.lambda_temp, "loss");
    }
    if (const json* sec = section(root, "train", "top level")) {
        check_keys(*sec, "train",
                   {"batch_size", "max_epochs", "patience", "min_delta", "mode", "lr", "beta1",
                    "beta2", "eps"});
        get_to(*sec, "batch_size", cfg.train.batch_size, "train");
        get_to(*sec, "max_epochs", cfg.train.max_epochs, "train");
        get_to(*sec, "patience", cfg.train.patience, "train");
        get_to(*sec, "min_delta", cfg.train.min_delta, "train");
        get_mode(*sec, "mode", cfg.train.mode, "train");
        get_to(*sec, "lr", cfg.train.adam.lr, "train");
        get_to(*sec, "beta1", cfg.train.adam.beta1, "train");
        get_to(*sec, "beta2", cfg.train.adam.beta2, "train");
        get_to(*sec, "eps", cfg.train.adam.eps, "train");
    }
    if (const json* sec = section(root, "score", "top level")) {
        check_keys(*sec, "score", {"combine_alpha", "variant", "score_pos_weight"});
        get_to(*sec, "combine_alpha", cfg.score.combine_alpha, "score");
        get_variant(*sec, "variant", cfg.score.variant, "score");
        get_to(*sec, "score_pos_weight", cfg.score.score_pos_weight, "score");
    }
    if (const json* sec = section(root, "sequence", "top level")) {
        check_keys(*sec, "sequence", {"sequence_len", "stride", "topk", "variant"});
        get_to(*sec, "sequence_len", cfg.sequence.sequence_len, "sequence");
        get_to(*sec, "stride", cfg.sequence.stride, "sequence");
        get_to(*sec, "topk", cfg.sequence.topk, "sequence");
        get_variant(*sec, "variant", cfg.sequence.variant, "sequence");
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path);
}

std::string RunConfig::to_json_text() const {
    json root;
    root["seed"] = seed;
    root["data_dir"] = data_dir;
    root["out_dir"] = out_dir;
    root["checkpoint"] = checkpoint;
    root["min_precision"] = min_precision;
    root["sweep_hours"] = sweep_hours;
    root["filter_to_compromised"] = filter_to_compromised;
    root["dump_windows"] = dump_windows;

    json g;
    g["n_users"] = generator.n_users;
    g["n_days"] = generator.n_days;
    g["rate_logon"] = generator.rate_logon;
    g["rate_device"] = generator.rate_device;
    g["rate_file"] = generator.rate_file;
    g["rate_email"] = generator.rate_email;
    g["rate_http"] = generator.rate_http;
    g["work_start_hour"] = generator.work_start_hour;
    g["work_end_hour"] = generator.work_end_hour;
    g["burst_prob"] = generator.burst_prob;
    g["burst_factor_min"] = generator.burst_factor_min;
    g["burst_factor_max"] = generator.burst_factor_max;
    g["evening_prob"] = generator.evening_prob;
    g["owl_user_prob"] = generator.owl_user_prob;
    g["owl_evening_prob"] = generator.owl_evening_prob;
    g["attack_min_day"] = generator.attack_min_day;
    g["attack_max_day"] = generator.attack_max_day;
    g["attacks"] = attacks_to_json(generator.attacks);
    root["generator"] = g;

    json ing;
    ing["timestamp_format"] = ingest.timestamp_format;
    ing["time_col"] = ingest.time_col;
    ing["user_col"] = ingest.user_col;
    ing["activity_col"] = ingest.activity_col;
    ing["pc_col"] = ingest.pc_col;
    ing["filename_col"] = ingest.filename_col;
    ing["to_col"] = ingest.to_col;
    ing["attachments_col"] = ingest.attachments_col;
    ing["url_col"] = ingest.url_col;
    root["ingest"] = ing;

    json w;
    w["window_hours"] = window.window_hours;
    w["bucket_hours"] = window.bucket_hours;
    root["window"] = w;

    json sp;
    sp["train_fraction"] = split.train_fraction;
    sp["buffer_hours"] = split.buffer_hours;
    sp["min_train_windows"] = split.min_train_windows;
    root["split"] = sp;

    json ar;
    ar["latent_dim"] = arch.latent_dim;
    ar["widths"] = arch.widths;
    ar["kernel"] = arch.kernel;
    ar["leaky_slope"] = arch.leaky_slope;
    root["arch"] = ar;

    json lo;
    lo["pos_weight"] = loss.pos_weight;
    lo["lambda_value"] = loss.lambda_value;
    lo["lambda_temp"] = loss.lambda_temp;
    root["loss"] = lo;

    json tr;
    tr["batch_size"] = train.batch_size;
    tr["max_epochs"] = train.max_epochs;
    tr["patience"] = train.patience;
    tr["min_delta"] = train.min_delta;
    tr["mode"] = train_mode_name(train.mode);
    tr["lr"] = train.adam.lr;
    tr["beta1"] = train.adam.beta1;
    tr["beta2"] = train.adam.beta2;
    tr["eps"] = train.adam.eps;
    root["train"] = tr;

    json sc;
    sc["combine_alpha"] = score.combine_alpha;
    sc["variant"] = score_variant_name(score.variant);
    sc["score_pos_weight"] = score.score_pos_weight;
    root["score"] = sc;

    json sq;
    sq["sequence_len"] = sequence.sequence_len;
    sq["stride"] = sequence.stride;
    sq["topk"] = sequence.topk;
    sq["variant"] = score_variant_name(sequence.variant);
    root["sequence"] = sq;

    return root.dump(2) + "\n";
}

void write_resolved_config(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    write_text_file(cfg.out_dir + "/resolved_config.json", cfg.to_json_text());
}

GenerateOutcome run_generate(const RunConfig& cfg) {
    GeneratorConfig g = cfg.generator;
    g.seed = cfg.seed;  // the run seed governs every stage
    GeneratedCorpus corpus = generate_corpus(g);

    ensure_dir(cfg.data_dir);
    write_corpus(corpus.streams, corpus.truth, cfg.data_dir, cfg.ingest);
    write_resolved_config(cfg);

    GenerateOutcome out;
    for (const auto& [user, events] : corpus.streams) {
        out.n_events += static_cast<std::int64_t>(events.size());
    }
    out.n_campaigns = corpus.truth.size();
    log_line("generate", "wrote " + std::to_string(out.n_events) + " events for " +
                             std::to_string(corpus.streams.size()) + " users, " +
                             std::to_string(out.n_campaigns) + " campaigns -> " + cfg.data_dir);
    return out;
}

Dataset load_dataset(const RunConfig& cfg) {
    cfg.window.validate();
    cfg.split.validate();

    ParsedEvents parsed = parse_events(corpus_event_paths(cfg.data_dir), cfg.ingest);
    GroundTruth gt = parse_ground_truth(cfg.data_dir + "/ground_truth.csv", cfg.ingest);

    Dataset ds;
    ds.truth = gt.intervals;
    ds.warnings = parsed.report.rejects;
    ds.warnings.insert(ds.warnings.end(), gt.rejects.begin(), gt.rejects.end());

    log_line("ingest", std::to_string(parsed.report.rows_total) + " rows, " +
                           std::to_string(parsed.report.rows_rejected) + " rejected, " +
                           std::to_string(gt.intervals.size()) + " attack intervals (" +
                           std::to_string(gt.rejects.size()) + " interval rows excluded)");
    log_warnings("ingest", ds.warnings);

    EventStreams streams = parsed.streams;
    if (cfg.filter_to_compromised) {
        streams = filter_compromised_users(streams, ds.truth);
        log_line("ingest", "kept " + std::to_string(streams.size()) + " of " +
                               std::to_string(parsed.streams.size()) + " users named in ground truth");
    }

    WindowBuildResult built = build_windows(streams, cfg.window, ds.truth);
    ds.windows = built.samples;
    log_warnings("window", built.warnings);
    ds.warnings.insert(ds.warnings.end(), built.warnings.begin(), built.warnings.end());

    ds.split = chronological_split(ds.windows, ds.truth, cfg.split);
    log_warnings("split", ds.split.warnings);
    ds.warnings.insert(ds.warnings.end(), ds.split.warnings.begin(), ds.split.warnings.end());

    std::size_t malicious = 0;
    for (const WindowSample& s : ds.windows) malicious += s.malicious ? 1u : 0u;
    log_line("window", std::to_string(ds.windows.size()) + " windows (" +
                           std::to_string(malicious) + " malicious), train " +
                           std::to_string(ds.split.train.size()) + ", test " +
                           std::to_string(ds.split.test.size()));

    ds.streams = std::move(streams);
    return ds;
}

TrainOutcome run_train(const RunConfig& cfg) {
    cfg.arch.validate();
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    tc.validate();

    Dataset ds = load_dataset(cfg);
    if (ds.split.train.empty()) {
        throw DataContractError("training split is empty; nothing to fit");
    }

    ModelParameters m =
        init_model(cfg.arch, cfg.loss, tc.mode, cfg.window.t(), kFeatureCount, cfg.seed);
    m.norm = compute_norm_stats(ds.split.train);

    std::vector<EpochStats> history = train(m, ds.split.train, tc);

    ensure_dir(cfg.out_dir);
    const std::string ckpt = cfg.checkpoint_path();
    save_checkpoint(m, ckpt);

    std::ostringstream hist;
    hist << "epoch,loss,l_mask,l_value,l_temp\n";
    for (const EpochStats& e : history) {
        hist << e.epoch << "," << format_double(e.loss) << "," << format_double(e.l_mask) << ","
             << format_double(e.l_value) << "," << format_double(e.l_temp) << "\n";
    }
    write_text_file(cfg.out_dir + "/train_history.csv", hist.str());

    if (cfg.dump_windows) {
        write_windows_csv(ds.windows, cfg.out_dir + "/windows.csv");
    }
    write_resolved_config(cfg);

    TrainOutcome out;
    out.checkpoint_path = ckpt;
    out.history = history;
    out.n_train = ds.split.train.size();
    out.n_test = ds.split.test.size();
    log_line("train", "mode " + std::string(train_mode_name(tc.mode)) + ", " +
                          std::to_string(history.size()) + " epochs, final loss " +
                          (history.empty() ? std::string("n/a")
                                           : format_double(history.back().loss)) +
                          ", pos_weight " + format_double(m.loss.pos_weight) + " -> " + ckpt);
    return out;
}

EvaluateOutcome run_evaluate(const RunConfig& cfg) {
    cfg.score.validate();
    ModelParameters m = load_model_for(cfg, "evaluate");
    Dataset ds = load_dataset(cfg);
    if (ds.split.test.empty()) {
        throw DataContractError("test split is empty; nothing to evaluate");
    }

    EvaluateOutcome out;
    out.records = score_corpus(m, ds.split.test, cfg.score);

    ensure_dir(cfg.out_dir);
    ensure_dir(cfg.out_dir + "/curves");
    out.scores_csv = cfg.out_dir + "/scores.csv";
    write_scores_csv(out.records, out.scores_csv);

    const ScoreVariant resolved = resolve_variant(cfg.score.variant, m.mode);
    std::vector<LabeledScore> items = to_labeled(out.records, resolved);
    out.report = stratified_report(items);
    out.op_point = operating_point(items, cfg.min_precision);

    self_check_scores(out.records, out.scores_csv, resolved, out.report);

    write_curve_csv(pr_curve(items), cfg.out_dir + "/curves/overall.csv");
    for (int scenario : positive_scenarios(items)) {
        std::vector<LabeledScore> sub = stratum_subset(items, scenario);
        if (!stratum_has_both_classes(sub)) continue;
        write_curve_csv(pr_curve(sub),
                        cfg.out_dir + "/curves/scenario_" + std::to_string(scenario) + ".csv");
    }

    json report;
    report["variant"] = score_variant_name(resolved);
    report["mode"] = train_mode_name(m.mode);
    report["window_hours"] = cfg.window.window_hours;
    report["n_test_windows"] = out.records.size();
    if (out.op_point.has_value()) {
        json op;
        op["min_precision"] = cfg.min_precision;
        op["threshold"] = out.op_point->threshold;
        op["precision"] = out.op_point->precision;
        op["recall"] = out.op_point->recall;
        report["operating_point"] = op;
    } else {
        report["operating_point"] = nullptr;
    }
    json strata = json::array();
    for (const StratumMetrics& s : out.report) strata.push_back(stratum_to_json(s));
    report["strata"] = strata;

    out.metrics_json = cfg.out_dir + "/metrics.json";
    write_text_file(out.metrics_json, report.dump(2) + "\n");
    write_resolved_config(cfg);

    const StratumMetrics& overall = find_stratum(out.report, "overall");
    log_line("evaluate", "variant " + std::string(score_variant_name(resolved)) + ", PR-AUC " +
                             (overall.valid ? format_double(overall.pr_auc) : std::string("n/a")) +
                             ", ROC-AUC " +
                             (overall.valid ? format_double(overall.roc_auc) : std::string("n/a")) +
                             " over " + std::to_string(out.records.size()) + " test windows");
    return out;
}

CampaignOutcome run_campaign(const RunConfig& cfg) {
    cfg.sequence.validate();
    cfg.score.validate();
    ModelParameters m = load_model_for(cfg, "campaign");
    Dataset ds = load_dataset(cfg);
    if (ds.split.test.empty()) {
        throw DataContractError("test split is empty; nothing to evaluate");
    }

    std::vector<AnomalyScoreRecord> records = score_corpus(m, ds.split.test, cfg.score);
    SequenceExtraction ext = extract_sequences(records, cfg.sequence, m.mode);
    log_warnings("campaign", ext.warnings);
    if (ext.sequences.empty()) {
        std::map<std::string, std::size_t> per_user;
        for (const AnomalyScoreRecord& r : records) ++per_user[r.user];
        std::size_t longest = 0;
        for (const auto& [user, n] : per_user) longest = std::max(longest, n);
        throw DataContractError(
            "no user has a full sequence: sequence_len " +
            std::to_string(cfg.sequence.sequence_len) + " windows but the longest test series is " +
            std::to_string(longest));
    }

    CampaignOutcome out;
    out.sequences = std::move(ext.sequences);
    const std::vector<Aggregator> aggs = default_aggregators(cfg.sequence);
    score_sequences(out.sequences, aggs);

    ensure_dir(cfg.out_dir);
    ensure_dir(cfg.out_dir + "/curves");
    out.sequences_csv = cfg.out_dir + "/sequences.csv";
    write_sequences_csv(out.sequences, out.sequences_csv);

    json report;
    report["sequence_len"] = cfg.sequence.sequence_len;
    report["stride"] = cfg.sequence.stride;
    report["variant"] = score_variant_name(resolve_variant(cfg.sequence.variant, m.mode));
    report["n_sequences"] = out.sequences.size();
    json agg_obj;
    for (std::size_t ai = 0; ai < aggs.size(); ++ai) {
        std::vector<LabeledScore> items;
        items.reserve(out.sequences.size());
        for (const SequenceRecord& s : out.sequences) {
            LabeledScore ls;
            ls.score = s.aggregates[ai].second;
            ls.label = s.malicious ? 1 : 0;
            ls.scenario = s.scenario;
            ls.user = s.user;
            items.push_back(std::move(ls));
        }
        std::vector<StratumMetrics> rep = stratified_report(items);
        json strata = json::array();
        for (const StratumMetrics& s : rep) {
            strata.push_back(stratum_to_json(s));
            out.report.emplace_back(aggs[ai].name, s);
        }
        agg_obj[aggs[ai].name]["strata"] = strata;
        write_curve_csv(pr_curve(items),
                        cfg.out_dir + "/curves/campaign_" + aggs[ai].name + ".csv");
    }
    report["aggregators"] = agg_obj;

    out.metrics_json = cfg.out_dir + "/campaign_metrics.json";
    write_text_file(out.metrics_json, report.dump(2) + "\n");
    write_resolved_config(cfg);

    std::ostringstream summary;
    summary << out.sequences.size() << " sequences;";
    for (const auto& [agg, s] : out.report) {
        if (s.name == "overall" && s.valid) {
            summary << " " << agg << " PR-AUC " << format_double(s.pr_auc);
        }
    }
    log_line("campaign", summary.str());
    return out;
}

std::vector<SweepLeg> run_sweep(const RunConfig& cfg) {
    if (cfg.sweep_hours.empty()) throw ConfigError("sweep_hours must not be empty");

    std::vector<SweepLeg> legs;
    for (int hours : cfg.sweep_hours) {
        RunConfig leg_cfg = cfg;
        leg_cfg.window.window_hours = hours;
        leg_cfg.out_dir = cfg.out_dir + "/sweep_w" + std::to_string(hours);
        leg_cfg.checkpoint.clear();  // each leg keeps its own model.ckpt
        log_line("sweep", "W=" + std::to_string(hours) + "h -> " + leg_cfg.out_dir);

        const auto t0 = std::chrono::steady_clock::now();
        run_train(leg_cfg);
        EvaluateOutcome ev = run_evaluate(leg_cfg);
        const auto t1 = std::chrono::steady_clock::now();

        SweepLeg leg;
        leg.window_hours = hours;
        const StratumMetrics& overall = find_stratum(ev.report, "overall");
        leg.pr_auc = overall.pr_auc;
        leg.roc_auc = overall.roc_auc;
        leg.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
        legs.push_back(leg);
    }

    ensure_dir(cfg.out_dir);
    std::ostringstream csv;
    // runtime_seconds is wall clock and therefore the one column the seed does
    // not determine.
    csv << "window_hours,pr_auc,roc_auc,runtime_seconds\n";
    json rows = json::array();
    for (const SweepLeg& leg : legs) {
        csv << leg.window_hours << "," << format_double(leg.pr_auc) << ","
            << format_double(leg.roc_auc) << "," << runtime_csv_value(leg.runtime_seconds)
            << "\n";
        json row;
        row["window_hours"] = leg.window_hours;
        row["pr_auc"] = leg.pr_auc;
        row["roc_auc"] = leg.roc_auc;
        row["runtime_seconds"] = leg.runtime_seconds;
        rows.push_back(row);
    }
    write_text_file(cfg.out_dir + "/sweep.csv", csv.str());
    json report;
    report["legs"] = rows;
    write_text_file(cfg.out_dir + "/sweep.json", report.dump(2) + "\n");
    write_resolved_config(cfg);

    for (const SweepLeg& leg : legs) {
        log_line("sweep", "W=" + std::to_string(leg.window_hours) + "h PR-AUC " +
                              format_double(leg.pr_auc) + " ROC-AUC " +
                              format_double(leg.roc_auc));
    }
    return legs;
}

}  // namespace ueba
