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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace damlink {

// Experiment description, version 1. Loaded from JSON; two built-in
// profiles cover the reference system and a quick desk-scale variant.
struct SystemSection {
    int num_antennas = 256;            // M_t
    int num_rf_chains = 5;             // M_RF
    double carrier_hz = 28e9;
    double bandwidth_hz = 128e6;
    double noise_psd_dbm_hz = -174.0;  // N0
    double spacing_over_wavelength = 0.5;
    double coherence_time_s = 1e-3;
    double tx_power_dbm = 30.0;
};

struct ChannelSection {
    int num_paths = 5;          // L
    double max_delay_s = 312.5e-9;
    int max_subpaths = 3;
    double aod_lo_deg = -60.0;
    double aod_hi_deg = 60.0;
    double path_gain_db = 0.0;
};

struct OfdmSection {
    int subcarriers = 512;  // K
    int cp_len = -1;        // -1: use the derived maximum delay tap count
};

struct SweepSection {
    std::string variable;        // "", "m_t", or "p_dbm"
    std::vector<double> values;  // empty: single point at the configured value
};

struct MonteCarloSection {
    int num_channels = 100;
    int symbols_per_block = 2000;     // DAM symbols / OFDM symbols per block
    int papr_blocks_per_channel = 10;
    int empirical_sinr_symbols = 0;   // 0: skip empirical SINR in sweeps
    int ber_blocks = 100;
    int qam_order = 128;
    std::uint64_t base_seed = 1;
};

struct ExperimentConfig {
    int version = 1;
    std::string profile_name = "custom";
    SystemSection system;
    ChannelSection channel;
    OfdmSection ofdm;
    SweepSection sweep;
    MonteCarloSection mc;
};

// Reference configuration: 256-antenna array, 5 RF chains, 28 GHz,
// 128 MHz, 5 paths within 312.5 ns, 512 subcarriers.
ExperimentConfig table1_profile();

// Desk-scale variant for fast runs: 64 antennas, -120 dB average channel
// gain (a realistic mmWave link budget, keeping receive SNR near 20 dB),
// reduced Monte Carlo sizes; all other physics as table1.
ExperimentConfig desk_profile();

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Quantities derived from a configuration. Products that define integer
// sample counts are rounded to the nearest integer before any floor to
// keep exact-valued products (e.g. 312.5 ns * 128 MHz) stable against
// floating-point representation error.
struct DerivedConstants {
    double noise_var_w = 0.0;      // N0 * B, in watts
    double sample_period_s = 0.0;  // 1 / B
    int max_delay_taps = 0;        // floor(max_delay_s * B)
    std::int64_t coherence_samples = 0;  // B * T_c
    int ofdm_symbols_per_coherence = 0;  // floor(n_c / (K + cp))
    int cp_len = 0;                      // resolved prefix length
    double tx_power_w = 0.0;
};

DerivedConstants derive_constants(const ExperimentConfig& cfg);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Output options shared by the CLI commands. Summary CSV goes to
// out_path; commands with per-run detail write <runs_prefix>_dam.csv and
// <runs_prefix>_ofdm.csv when runs_prefix is set. deterministic
// suppresses the generation-timestamp header line so repeated runs are
// byte-identical.
struct CommandOptions {
    std::string out_path;
    std::string runs_prefix;
    bool deterministic = false;
    std::optional<std::uint64_t> seed_override;
};

// Spectral-efficiency sweep over the configured variable, all four
// scheme/beamforming combinations per point, analytic SINR and
// water-filling rates averaged over mc.num_channels draws.
void cmd_spectral_efficiency(const ExperimentConfig& cfg, const CommandOptions& opts);

// Bit-error-rate sweep over transmit power for all four combinations.
void cmd_ber(const ExperimentConfig& cfg, const CommandOptions& opts);

// PAPR complementary CDF over a fixed dB threshold grid for all four
// combinations.
void cmd_papr(const ExperimentConfig& cfg, const CommandOptions& opts);

// Draws one channel realization from the configuration and writes it,
// with its generation parameters, as JSON.
void cmd_gen_channel(const ExperimentConfig& cfg, const CommandOptions& opts);

}  // namespace damlink
