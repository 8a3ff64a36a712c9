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

#include "ueba/common.hpp"
#include "ueba/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool out_given = false;
};

void add_common_flags(CLI::App* sub, CliArgs& args) {
    sub->add_option("--config", args.config_path, "JSON run config (defaults apply when omitted)")
        ->option_text("PATH");
    sub->add_option("--seed", args.seed, "Override the config seed")
        ->option_text("N")
        ->each([&args](const std::string&) { args.seed_given = true; });
    sub->add_option("--out", args.out_dir, "Override the config output directory")
        ->option_text("DIR")
        ->each([&args](const std::string&) { args.out_given = true; });
}

ueba::RunConfig resolve_config(const CliArgs& args) {
    ueba::RunConfig cfg = args.config_path.empty() ? ueba::RunConfig::defaults()
                                                   : ueba::RunConfig::from_file(args.config_path);
    if (args.seed_given) cfg.seed = args.seed;
    if (args.out_given) cfg.out_dir = args.out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Window-level and campaign-level insider-threat detection on audit logs"};
    app.require_subcommand(1);

    CliArgs args;
    CLI::App* cmd_generate =
        app.add_subcommand("generate", "Synthesize an audit corpus with labeled campaigns");
    CLI::App* cmd_train =
        app.add_subcommand("train", "Fit the window autoencoder on the benign training split");
    CLI::App* cmd_evaluate =
        app.add_subcommand("evaluate", "Score the test split and report window-level metrics");
    CLI::App* cmd_campaign =
        app.add_subcommand("campaign", "Aggregate window scores into sequence-level metrics");
    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "Train and evaluate across window durations");
    for (CLI::App* sub : {cmd_generate, cmd_train, cmd_evaluate, cmd_campaign, cmd_sweep}) {
        add_common_flags(sub, args);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // every usage problem maps to the config exit code
    }

    try {
        const ueba::RunConfig cfg = resolve_config(args);
        if (cmd_generate->parsed()) {
            ueba::run_generate(cfg);
        } else if (cmd_train->parsed()) {
            ueba::run_train(cfg);
        } else if (cmd_evaluate->parsed()) {
            ueba::run_evaluate(cfg);
        } else if (cmd_campaign->parsed()) {
            ueba::run_campaign(cfg);
        } else if (cmd_sweep->parsed()) {
            ueba::run_sweep(cfg);
        }
        return 0;
    } catch (const ueba::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ueba::DataContractError& e) {
        std::cerr << "data contract violation: " << e.what() << "\n";
        return 2;
    } catch (const ueba::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
}
