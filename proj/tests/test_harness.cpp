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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "damlink/channel.hpp"
#include "damlink/errors.hpp"
#include "damlink/harness.hpp"
#include "test_support.hpp"

using damlink::CommandOptions;
using damlink::ExperimentConfig;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.push_back("");
    }
    return cells;
}

// Small, fast configuration: 6 delay taps, 16 subcarriers, 128 samples
// of coherence (5 OFDM symbols of 22 samples).
ExperimentConfig tiny_config() {
    ExperimentConfig cfg = damlink::table1_profile();
    cfg.profile_name = "custom";
    cfg.system.num_antennas = 8;
    cfg.system.num_rf_chains = 2;
    cfg.system.coherence_time_s = 1e-6;
    cfg.channel.num_paths = 2;
    cfg.channel.max_delay_s = 50e-9;
    cfg.channel.max_subpaths = 2;
    cfg.ofdm.subcarriers = 16;
    cfg.mc.num_channels = 3;
    cfg.mc.symbols_per_block = 50;
    cfg.mc.papr_blocks_per_channel = 3;
    cfg.mc.empirical_sinr_symbols = 0;
    cfg.mc.ber_blocks = 2;
    cfg.mc.qam_order = 4;
    cfg.mc.base_seed = 9;
    return cfg;
}

}  // namespace

TEST_CASE("dbm and watt conversions") {
    CHECK(test_support::rel_err(damlink::dbm_to_watts(30.0), 1.0) < 1e-12);
    CHECK(test_support::rel_err(damlink::dbm_to_watts(0.0), 1e-3) < 1e-12);
    CHECK(test_support::rel_err(damlink::dbm_to_watts(-174.0), std::pow(10.0, -20.4)) < 1e-12);
    CHECK(std::abs(damlink::watts_to_dbm(1.0) - 30.0) < 1e-12);
    for (double dbm : {-37.0, -3.5, 0.0, 12.25, 44.0}) {
        CHECK(std::abs(damlink::watts_to_dbm(damlink::dbm_to_watts(dbm)) - dbm) < 1e-12);
    }
    CHECK_THROWS_AS(damlink::watts_to_dbm(0.0), damlink::DomainError);
    CHECK_THROWS_AS(damlink::watts_to_dbm(-1.0), damlink::DomainError);
}

TEST_CASE("reference profile values") {
    const ExperimentConfig cfg = damlink::table1_profile();
    CHECK(cfg.profile_name == "table1");
    CHECK(cfg.system.num_antennas == 256);
    CHECK(cfg.system.num_rf_chains == 5);
    CHECK(cfg.system.carrier_hz == 28e9);
    CHECK(cfg.system.bandwidth_hz == 128e6);
    CHECK(cfg.system.noise_psd_dbm_hz == -174.0);
    CHECK(cfg.system.spacing_over_wavelength == 0.5);
    CHECK(cfg.system.coherence_time_s == 1e-3);
    CHECK(cfg.system.tx_power_dbm == 30.0);
    CHECK(cfg.channel.num_paths == 5);
    CHECK(cfg.channel.max_delay_s == 312.5e-9);
    CHECK(cfg.channel.max_subpaths == 3);
    CHECK(cfg.channel.aod_lo_deg == -60.0);
    CHECK(cfg.channel.aod_hi_deg == 60.0);
    CHECK(cfg.channel.path_gain_db == 0.0);
    CHECK(cfg.ofdm.subcarriers == 512);
    CHECK(cfg.ofdm.cp_len == -1);
    CHECK(cfg.sweep.variable.empty());
    CHECK(cfg.sweep.values.empty());
}

TEST_CASE("desk profile deviations from the reference") {
    const ExperimentConfig cfg = damlink::desk_profile();
    CHECK(cfg.profile_name == "desk");
    CHECK(cfg.system.num_antennas == 64);
    CHECK(cfg.channel.path_gain_db == -120.0);
    CHECK(cfg.sweep.variable == "m_t");
    CHECK(cfg.sweep.values == std::vector<double>{16, 32, 48, 64});
    CHECK(cfg.mc.papr_blocks_per_channel == 100);
    // Physics inherited unchanged.
    CHECK(cfg.system.bandwidth_hz == 128e6);
    CHECK(cfg.system.carrier_hz == 28e9);
    CHECK(cfg.ofdm.subcarriers == 512);
    CHECK(cfg.channel.max_delay_s == 312.5e-9);
}

TEST_CASE("derived constants for the reference profile") {
    const damlink::DerivedConstants d = damlink::derive_constants(damlink::table1_profile());
    // N0 * B = 10^(-20.4) W/Hz * 128 MHz, about 5.0958e-13 W.
    CHECK(test_support::rel_err(d.noise_var_w, std::pow(10.0, -20.4) * 128e6) < 1e-12);
    CHECK(test_support::rel_err(d.noise_var_w, 5.0958e-13) < 1e-4);
    CHECK(d.sample_period_s == 1.0 / 128e6);
    CHECK(d.max_delay_taps == 40);
    CHECK(d.coherence_samples == 128000);
    CHECK(d.cp_len == 40);
    CHECK(d.ofdm_symbols_per_coherence == 231);
    CHECK(test_support::rel_err(d.tx_power_w, 1.0) < 1e-12);
}

TEST_CASE("tap counts survive floating-point representation error") {
    ExperimentConfig cfg = damlink::table1_profile();

    // 0.7e-7 s * 1e8 Hz is exactly 7 samples on paper.
    cfg.system.bandwidth_hz = 1e8;
    cfg.channel.max_delay_s = 0.7e-7;
    CHECK(damlink::derive_constants(cfg).max_delay_taps == 7);

    // A genuinely fractional product still floors.
    cfg.channel.max_delay_s = 7.6e-8;
    CHECK(damlink::derive_constants(cfg).max_delay_taps == 7);

    // Explicit prefix length overrides the derived tap count.
    cfg.ofdm.cp_len = 3;
    CHECK(damlink::derive_constants(cfg).cp_len == 3);
}

TEST_CASE("derived constant validation") {
    ExperimentConfig cfg = damlink::table1_profile();
    cfg.system.bandwidth_hz = 0.0;
    CHECK_THROWS_AS(damlink::derive_constants(cfg), damlink::ConfigError);

    cfg = damlink::table1_profile();
    cfg.system.coherence_time_s = 0.0;
    CHECK_THROWS_AS(damlink::derive_constants(cfg), damlink::ConfigError);

    cfg = damlink::table1_profile();
    cfg.ofdm.subcarriers = 0;
    CHECK_THROWS_AS(damlink::derive_constants(cfg), damlink::ConfigError);

    cfg = damlink::table1_profile();
    cfg.channel.max_delay_s = -1e-9;
    CHECK_THROWS_AS(damlink::derive_constants(cfg), damlink::ConfigError);

    // Sub-sample coherence block.
    cfg = damlink::table1_profile();
    cfg.system.bandwidth_hz = 1.0;
    cfg.system.coherence_time_s = 0.4;
    CHECK_THROWS_AS(damlink::derive_constants(cfg), damlink::ConfigError);
}

TEST_CASE("configurations round-trip through json") {
    for (const ExperimentConfig& cfg : {damlink::table1_profile(), damlink::desk_profile()}) {
        const nlohmann::json j1 = damlink::to_json(cfg);
        const ExperimentConfig back = damlink::config_from_json(j1);
        const nlohmann::json j2 = damlink::to_json(back);
        CHECK(j1.dump() == j2.dump());
    }
}

TEST_CASE("optional config sections fall back to defaults") {
    nlohmann::json j;
    j["version"] = 1;
    j["system"] = {{"num_antennas", 16},       {"num_rf_chains", 2},
                   {"carrier_hz", 28e9},       {"bandwidth_hz", 1e8},
                   {"noise_psd_dbm_hz", -174.0}, {"spacing_over_wavelength", 0.5},
                   {"coherence_time_s", 1e-3}, {"tx_power_dbm", 20.0}};
    j["channel"] = {{"num_paths", 3},
                    {"max_delay_s", 100e-9},
                    {"max_subpaths", 2},
                    {"aod_lo_deg", -45.0},
                    {"aod_hi_deg", 45.0}};
    j["ofdm"] = {{"subcarriers", 64}};

    const ExperimentConfig cfg = damlink::config_from_json(j);
    CHECK(cfg.profile_name == "custom");
    CHECK(cfg.channel.path_gain_db == 0.0);
    CHECK(cfg.ofdm.cp_len == -1);
    CHECK(cfg.sweep.variable.empty());
    CHECK(cfg.mc.num_channels == 100);
    CHECK(cfg.mc.qam_order == 128);
    CHECK(cfg.mc.base_seed == 1);
}

TEST_CASE("config parsing rejects malformed documents") {
    nlohmann::json good = damlink::to_json(damlink::table1_profile());

    nlohmann::json bad = good;
    bad["version"] = 2;
    CHECK_THROWS_AS(damlink::config_from_json(bad), damlink::ConfigError);

    bad = good;
    bad.erase("system");
    CHECK_THROWS_AS(damlink::config_from_json(bad), damlink::ConfigError);

    bad = good;
    bad["channel"].erase("num_paths");
    CHECK_THROWS_AS(damlink::config_from_json(bad), damlink::ConfigError);

    bad = good;
    bad["system"]["num_antennas"] = "many";
    CHECK_THROWS_AS(damlink::config_from_json(bad), damlink::ConfigError);
}

TEST_CASE("gen-channel writes a replayable draw") {
    const ExperimentConfig cfg = tiny_config();
    CommandOptions opts;
    opts.out_path = "/tmp/damlink_t_genchan_a.json";
    opts.deterministic = true;
    damlink::cmd_gen_channel(cfg, opts);

    const nlohmann::json j = nlohmann::json::parse(read_file(opts.out_path));
    CHECK(j.at("schema").get<std::string>() == "damlink.channel_file.v1");
    CHECK(j.at("config").at("num_antennas").get<int>() == 8);
    CHECK(j.at("config").at("max_delay_taps").get<int>() == 6);
    CHECK(j.at("config").at("seed").get<std::uint64_t>() == 9);

    const damlink::ChannelRealization ch = damlink::channel_from_json(j.at("realization"));
    CHECK(ch.num_antennas() == 8);
    CHECK(ch.num_paths() == 2);

    // Same configuration, second run: byte-identical output.
    CommandOptions opts2 = opts;
    opts2.out_path = "/tmp/damlink_t_genchan_b.json";
    damlink::cmd_gen_channel(cfg, opts2);
    CHECK(read_file(opts.out_path) == read_file(opts2.out_path));

    // The seed override replaces the configured base seed.
    CommandOptions opts3 = opts;
    opts3.out_path = "/tmp/damlink_t_genchan_c.json";
    opts3.seed_override = 123;
    damlink::cmd_gen_channel(cfg, opts3);
    const nlohmann::json j3 = nlohmann::json::parse(read_file(opts3.out_path));
    CHECK(j3.at("config").at("seed").get<std::uint64_t>() == 123);

    CommandOptions no_out;
    CHECK_THROWS_AS(damlink::cmd_gen_channel(cfg, no_out), damlink::ConfigError);
}

TEST_CASE("spectral-efficiency sweep output") {
    ExperimentConfig cfg = tiny_config();
    cfg.sweep.variable = "m_t";
    cfg.sweep.values = {4, 8};
    cfg.mc.empirical_sinr_symbols = 50;

    CommandOptions opts;
    opts.out_path = "/tmp/damlink_t_se_a.csv";
    opts.runs_prefix = "/tmp/damlink_t_se_a_runs";
    opts.deterministic = true;
    damlink::cmd_spectral_efficiency(cfg, opts);

    const std::vector<std::string> lines = split_lines(read_file(opts.out_path));
    REQUIRE(lines.size() == 2 + 2 * 4);  // tool line, header, 2 points x 4 combos
    CHECK(lines[0] == "# damlink spectral-efficiency profile=custom seed=9");
    CHECK(split_csv(lines[1]) ==
          std::vector<std::string>{"sweep_variable", "sweep_value", "scheme", "beamforming",
                                   "n_channels", "m_t", "p_dbm", "mean_sinr_db", "mean_se_bpshz",
                                   "overhead"});
    const std::vector<std::string> first = split_csv(lines[2]);
    REQUIRE(first.size() == 10);
    CHECK(first[0] == "m_t");
    CHECK(first[1] == "4");
    CHECK(first[2] == "dam");
    CHECK(first[3] == "digital");
    CHECK(first[4] == "3");
    CHECK(first[5] == "4");
    CHECK(first[6] == "30");
    CHECK(std::stod(first[7]) > 0.0);  // receive SINR far above 0 dB here
    CHECK(std::stod(first[8]) > 0.0);

    // Combo order repeats per sweep point.
    CHECK(split_csv(lines[3])[2] == "dam");
    CHECK(split_csv(lines[3])[3] == "hybrid");
    CHECK(split_csv(lines[4])[2] == "ofdm");
    CHECK(split_csv(lines[5])[3] == "hybrid");
    CHECK(split_csv(lines[6])[1] == "8");

    // Per-run files: one row per channel per beamforming per point.
    const std::vector<std::string> dam_lines =
        split_lines(read_file(opts.runs_prefix + std::string("_dam.csv")));
    REQUIRE(dam_lines.size() == 2 + 2 * 3 * 2);
    CHECK(split_csv(dam_lines[1]) ==
          std::vector<std::string>{"run_id", "seed", "beamforming", "m_t", "m_rf", "l", "p_dbm",
                                   "sinr_analytic_db", "sinr_empirical_db", "se_bpshz",
                                   "overhead"});
    const std::vector<std::string> run0 = split_csv(dam_lines[2]);
    REQUIRE(run0.size() == 11);
    CHECK(run0[0] == "0");
    CHECK(run0[2] == "digital");
    CHECK(run0[3] == "4");
    CHECK(run0[4] == "2");
    CHECK(run0[5] == "2");
    CHECK(!run0[8].empty());  // empirical SINR was requested

    const std::vector<std::string> ofdm_lines =
        split_lines(read_file(opts.runs_prefix + std::string("_ofdm.csv")));
    REQUIRE(ofdm_lines.size() == 2 + 2 * 3 * 2);
    REQUIRE(split_csv(ofdm_lines[2]).size() == 12);

    // Byte-identical repetition under --deterministic.
    CommandOptions opts2 = opts;
    opts2.out_path = "/tmp/damlink_t_se_b.csv";
    opts2.runs_prefix = "/tmp/damlink_t_se_b_runs";
    damlink::cmd_spectral_efficiency(cfg, opts2);
    CHECK(read_file(opts.out_path) == read_file(opts2.out_path));
    CHECK(read_file(opts.runs_prefix + std::string("_dam.csv")) ==
          read_file(opts2.runs_prefix + std::string("_dam.csv")));
    CHECK(read_file(opts.runs_prefix + std::string("_ofdm.csv")) ==
          read_file(opts2.runs_prefix + std::string("_ofdm.csv")));
}

TEST_CASE("spectral-efficiency sweep validation") {
    ExperimentConfig cfg = tiny_config();
    CommandOptions opts;
    opts.out_path = "/tmp/damlink_t_se_bad.csv";

    cfg.sweep.variable = "bogus";
    cfg.sweep.values = {1.0};
    CHECK_THROWS_AS(damlink::cmd_spectral_efficiency(cfg, opts), damlink::ConfigError);

    cfg.sweep.variable = "m_t";
    cfg.sweep.values = {0.0};
    CHECK_THROWS_AS(damlink::cmd_spectral_efficiency(cfg, opts), damlink::ConfigError);

    cfg = tiny_config();
    CHECK_THROWS_AS(damlink::cmd_spectral_efficiency(cfg, CommandOptions{}),
                    damlink::ConfigError);
}

TEST_CASE("ber sweep output") {
    ExperimentConfig cfg = tiny_config();
    cfg.sweep.variable = "p_dbm";
    cfg.sweep.values = {-40.0, -20.0};

    CommandOptions opts;
    opts.out_path = "/tmp/damlink_t_ber_a.csv";
    opts.deterministic = true;
    damlink::cmd_ber(cfg, opts);

    const std::vector<std::string> lines = split_lines(read_file(opts.out_path));
    REQUIRE(lines.size() == 2 + 2 * 4);
    CHECK(lines[0] == "# damlink ber profile=custom seed=9 qam=4");
    CHECK(split_csv(lines[1]) ==
          std::vector<std::string>{"scheme", "beamforming", "p_dbm", "snr_point", "value",
                                   "n_samples"});
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const std::vector<std::string> cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 6);
        const double ber = std::stod(cells[4]);
        CHECK(ber >= 0.0);
        CHECK(ber <= 1.0);
        CHECK(std::stoull(cells[5]) > 0);
    }
    CHECK(split_csv(lines[2])[2] == "-40");
    CHECK(split_csv(lines[6])[2] == "-20");

    CommandOptions opts2 = opts;
    opts2.out_path = "/tmp/damlink_t_ber_b.csv";
    damlink::cmd_ber(cfg, opts2);
    CHECK(read_file(opts.out_path) == read_file(opts2.out_path));

    // Only transmit power sweeps make sense for error-rate curves.
    cfg.sweep.variable = "m_t";
    cfg.sweep.values = {4.0};
    CHECK_THROWS_AS(damlink::cmd_ber(cfg, opts), damlink::ConfigError);
}

TEST_CASE("papr ccdf output") {
    ExperimentConfig cfg = tiny_config();
    cfg.mc.num_channels = 2;

    CommandOptions opts;
    opts.out_path = "/tmp/damlink_t_papr_a.csv";
    opts.deterministic = true;
    damlink::cmd_papr(cfg, opts);

    const std::vector<std::string> lines = split_lines(read_file(opts.out_path));
    const std::size_t thresholds = 53;  // 0 dB to 13 dB in 0.25 dB steps
    REQUIRE(lines.size() == 2 + 4 * thresholds);
    CHECK(split_csv(lines[1]) ==
          std::vector<std::string>{"scheme", "beamforming", "p_dbm", "threshold_db", "value",
                                   "n_samples"});

    for (int combo = 0; combo < 4; ++combo) {
        double prev = 1.0;
        for (std::size_t t = 0; t < thresholds; ++t) {
            const std::vector<std::string> cells =
                split_csv(lines[2 + combo * thresholds + t]);
            REQUIRE(cells.size() == 6);
            const double p = std::stod(cells[4]);
            CHECK(p >= 0.0);
            CHECK(p <= prev);
            prev = p;
            CHECK(cells[5] == "6");  // 2 channels x 3 blocks
        }
    }
    CHECK(split_csv(lines[2])[0] == "dam");
    CHECK(split_csv(lines[2 + 2 * thresholds])[0] == "ofdm");

    CommandOptions opts2 = opts;
    opts2.out_path = "/tmp/damlink_t_papr_b.csv";
    damlink::cmd_papr(cfg, opts2);
    CHECK(read_file(opts.out_path) == read_file(opts2.out_path));
}
