// SPDX-License-Identifier: Apache-2.0
//
// damlink: link-level simulator for delay-aligned single-carrier and
// cyclic-prefix OFDM transmission over sparse multipath MIMO channels.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// -------------------------------------------------------------------------

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "damlink/errors.hpp"
#include "damlink/harness.hpp"

namespace {

damlink::ExperimentConfig load_config(const std::string& config_path,
                                      const std::string& profile) {
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            throw damlink::ConfigError("cannot open config file: " + config_path);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw damlink::ConfigError(std::string("config json: ") + e.what());
        }
        return damlink::config_from_json(j);
    }
    if (profile == "table1") {
        return damlink::table1_profile();
    }
    if (profile == "desk") {
        return damlink::desk_profile();
    }
    throw damlink::ConfigError("unknown profile: " + profile);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"damlink: delay-aligned single-carrier vs OFDM link simulations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string profile = "table1";
    std::string out_path;
    std::string runs_prefix;
    std::uint64_t seed = 0;
    bool deterministic = false;

    app.add_option("--config", config_path, "experiment config JSON (overrides --profile)");
    app.add_option("--profile", profile, "built-in profile: table1 or desk")
        ->check(CLI::IsMember({"table1", "desk"}));
    app.add_option("--out", out_path, "output file path");
    app.add_option("--runs-out", runs_prefix,
                   "per-run CSV path prefix (spectral-efficiency only)");
    auto* seed_opt = app.add_option("--seed", seed, "override the config base seed");
    app.add_flag("--deterministic", deterministic,
                 "suppress the timestamp header so outputs are byte-identical");

    auto* cmd_gen = app.add_subcommand("gen-channel", "draw one channel realization to JSON");
    auto* cmd_se = app.add_subcommand("spectral-efficiency",
                                      "analytic spectral-efficiency sweep to CSV");
    auto* cmd_ber_sub = app.add_subcommand("ber", "bit-error-rate Monte Carlo to CSV");
    auto* cmd_papr_sub = app.add_subcommand("papr", "PAPR complementary CDF to CSV");
    // The shared options above live on the top-level app; let them appear
    // after the subcommand name as well.
    for (auto* sub : {cmd_gen, cmd_se, cmd_ber_sub, cmd_papr_sub}) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const damlink::ExperimentConfig cfg = load_config(config_path, profile);
        damlink::CommandOptions opts;
        opts.out_path = out_path;
        opts.runs_prefix = runs_prefix;
        opts.deterministic = deterministic;
        if (seed_opt->count() > 0) {
            opts.seed_override = seed;
        }

        if (cmd_gen->parsed()) {
            damlink::cmd_gen_channel(cfg, opts);
        } else if (cmd_se->parsed()) {
            damlink::cmd_spectral_efficiency(cfg, opts);
        } else if (cmd_ber_sub->parsed()) {
            damlink::cmd_ber(cfg, opts);
        } else if (cmd_papr_sub->parsed()) {
            damlink::cmd_papr(cfg, opts);
        }
    } catch (const damlink::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
