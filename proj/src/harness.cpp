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

#include "damlink/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "damlink/channel.hpp"
#include "damlink/errors.hpp"
#include "damlink/link_dam.hpp"
#include "damlink/link_ofdm.hpp"
#include "damlink/metrics.hpp"
#include "damlink/numerics.hpp"
#include "damlink/precoder_digital.hpp"
#include "damlink/precoder_hybrid.hpp"
#include "damlink/rng.hpp"

namespace damlink {

namespace {

constexpr int kConfigSchemaVersion = 1;
constexpr char kChannelFileSchema[] = "damlink.channel_file.v1";

// Guard added before flooring products that are integer-valued on paper
// (e.g. a delay spread that is an exact number of samples) but carry
// floating-point representation error.
constexpr double kIntegerGuard = 1e-9;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_db(double linear) {
    if (linear <= 0.0) {
        return "-inf";
    }
    return fmt_double(10.0 * std::log10(linear));
}

double mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) {
        return 0.0;
    }
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Minimal CSV sink. Rows are pre-formatted strings; the header comment
// carries run provenance and, unless suppressed, a generation timestamp.
class CsvFile {
  public:
    CsvFile(const std::string& path, const std::string& tool_line, bool deterministic)
        : out_(path, std::ios::binary) {
        if (!out_) {
            throw ConfigError("cannot open output file: " + path);
        }
        out_ << "# " << tool_line << "\n";
        if (!deterministic) {
            char stamp[64];
            const std::time_t now = std::time(nullptr);
            std::tm tm_utc{};
            gmtime_r(&now, &tm_utc);
            std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
            out_ << "# generated_at=" << stamp << "\n";
        }
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out_ << ",";
            }
            out_ << cells[i];
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

ChannelConfig channel_config_for(const ExperimentConfig& cfg, const DerivedConstants& derived,
                                 int num_antennas, std::uint64_t seed) {
    ChannelConfig ch;
    ch.geometry.num_antennas = num_antennas;
    ch.geometry.spacing_over_wavelength = cfg.system.spacing_over_wavelength;
    ch.num_paths = cfg.channel.num_paths;
    ch.max_delay_taps = derived.max_delay_taps;
    ch.max_subpaths = cfg.channel.max_subpaths;
    ch.aod_lo_deg = cfg.channel.aod_lo_deg;
    ch.aod_hi_deg = cfg.channel.aod_hi_deg;
    ch.path_gain_db = cfg.channel.path_gain_db;
    ch.seed = seed;
    return ch;
}

struct SweepPoint {
    std::string variable;
    double value = 0.0;
    int num_antennas = 0;
    double p_dbm = 0.0;
};

std::vector<SweepPoint> resolve_sweep(const ExperimentConfig& cfg) {
    std::vector<SweepPoint> points;
    if (cfg.sweep.variable.empty() || cfg.sweep.values.empty()) {
        points.push_back({"p_dbm", cfg.system.tx_power_dbm, cfg.system.num_antennas,
                          cfg.system.tx_power_dbm});
        return points;
    }
    if (cfg.sweep.variable == "m_t") {
        for (double v : cfg.sweep.values) {
            const int m = static_cast<int>(std::llround(v));
            if (m < 1) {
                throw ConfigError("sweep: antenna counts must be >= 1");
            }
            points.push_back({"m_t", v, m, cfg.system.tx_power_dbm});
        }
        return points;
    }
    if (cfg.sweep.variable == "p_dbm") {
        for (double v : cfg.sweep.values) {
            points.push_back({"p_dbm", v, cfg.system.num_antennas, v});
        }
        return points;
    }
    throw ConfigError("sweep: unknown variable '" + cfg.sweep.variable + "'");
}

std::uint64_t base_seed_of(const ExperimentConfig& cfg, const CommandOptions& opts) {
    return opts.seed_override.value_or(cfg.mc.base_seed);
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) {
        throw DomainError("watts_to_dbm: power must be positive");
    }
    return 10.0 * std::log10(watts) + 30.0;
}

ExperimentConfig table1_profile() {
    ExperimentConfig cfg;
    cfg.profile_name = "table1";
    cfg.system.num_antennas = 256;
    cfg.system.num_rf_chains = 5;
    cfg.system.carrier_hz = 28e9;
    cfg.system.bandwidth_hz = 128e6;
    cfg.system.noise_psd_dbm_hz = -174.0;
    cfg.system.spacing_over_wavelength = 0.5;
    cfg.system.coherence_time_s = 1e-3;
    cfg.system.tx_power_dbm = 30.0;
    cfg.channel.num_paths = 5;
    cfg.channel.max_delay_s = 312.5e-9;
    cfg.channel.max_subpaths = 3;
    cfg.channel.aod_lo_deg = -60.0;
    cfg.channel.aod_hi_deg = 60.0;
    cfg.channel.path_gain_db = 0.0;
    cfg.ofdm.subcarriers = 512;
    cfg.ofdm.cp_len = -1;
    cfg.sweep.variable.clear();
    cfg.sweep.values.clear();
    cfg.mc.num_channels = 100;
    cfg.mc.symbols_per_block = 2000;
    cfg.mc.papr_blocks_per_channel = 10;
    cfg.mc.empirical_sinr_symbols = 0;
    cfg.mc.ber_blocks = 100;
    cfg.mc.qam_order = 128;
    cfg.mc.base_seed = 1;
    return cfg;
}

ExperimentConfig desk_profile() {
    ExperimentConfig cfg = table1_profile();
    cfg.profile_name = "desk";
    cfg.system.num_antennas = 64;
    // Average channel gain representing a plausible mmWave link budget;
    // puts the fully digital receive SNR near 20 dB at 30 dBm so rate and
    // error-rate comparisons run in a meaningful regime.
    cfg.channel.path_gain_db = -120.0;
    cfg.sweep.variable = "m_t";
    cfg.sweep.values = {16, 32, 48, 64};
    cfg.mc.num_channels = 100;
    cfg.mc.symbols_per_block = 2000;
    cfg.mc.papr_blocks_per_channel = 100;
    cfg.mc.ber_blocks = 100;
    return cfg;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig cfg;
        if (j.at("version").get<int>() != kConfigSchemaVersion) {
            throw ConfigError("config: unsupported version");
        }
        cfg.profile_name = j.value("profile", std::string("custom"));

        const auto& sys = j.at("system");
        cfg.system.num_antennas = sys.at("num_antennas").get<int>();
        cfg.system.num_rf_chains = sys.at("num_rf_chains").get<int>();
        cfg.system.carrier_hz = sys.at("carrier_hz").get<double>();
        cfg.system.bandwidth_hz = sys.at("bandwidth_hz").get<double>();
        cfg.system.noise_psd_dbm_hz = sys.at("noise_psd_dbm_hz").get<double>();
        cfg.system.spacing_over_wavelength = sys.at("spacing_over_wavelength").get<double>();
        cfg.system.coherence_time_s = sys.at("coherence_time_s").get<double>();
        cfg.system.tx_power_dbm = sys.at("tx_power_dbm").get<double>();

        const auto& chan = j.at("channel");
        cfg.channel.num_paths = chan.at("num_paths").get<int>();
        cfg.channel.max_delay_s = chan.at("max_delay_s").get<double>();
        cfg.channel.max_subpaths = chan.at("max_subpaths").get<int>();
        cfg.channel.aod_lo_deg = chan.at("aod_lo_deg").get<double>();
        cfg.channel.aod_hi_deg = chan.at("aod_hi_deg").get<double>();
        cfg.channel.path_gain_db = chan.value("path_gain_db", 0.0);

        const auto& ofdm = j.at("ofdm");
        cfg.ofdm.subcarriers = ofdm.at("subcarriers").get<int>();
        cfg.ofdm.cp_len = ofdm.value("cp_len", -1);

        if (j.contains("sweep")) {
            cfg.sweep.variable = j.at("sweep").value("variable", std::string());
            cfg.sweep.values = j.at("sweep").value("values", std::vector<double>());
        }
        if (j.contains("monte_carlo")) {
            const auto& mc = j.at("monte_carlo");
            cfg.mc.num_channels = mc.value("num_channels", cfg.mc.num_channels);
            cfg.mc.symbols_per_block = mc.value("symbols_per_block", cfg.mc.symbols_per_block);
            cfg.mc.papr_blocks_per_channel =
                mc.value("papr_blocks_per_channel", cfg.mc.papr_blocks_per_channel);
            cfg.mc.empirical_sinr_symbols =
                mc.value("empirical_sinr_symbols", cfg.mc.empirical_sinr_symbols);
            cfg.mc.ber_blocks = mc.value("ber_blocks", cfg.mc.ber_blocks);
            cfg.mc.qam_order = mc.value("qam_order", cfg.mc.qam_order);
            cfg.mc.base_seed = mc.value("base_seed", cfg.mc.base_seed);
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config json: ") + e.what());
    }
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["version"] = kConfigSchemaVersion;
    j["profile"] = cfg.profile_name;
    j["system"] = {{"num_antennas", cfg.system.num_antennas},
                   {"num_rf_chains", cfg.system.num_rf_chains},
                   {"carrier_hz", cfg.system.carrier_hz},
                   {"bandwidth_hz", cfg.system.bandwidth_hz},
                   {"noise_psd_dbm_hz", cfg.system.noise_psd_dbm_hz},
                   {"spacing_over_wavelength", cfg.system.spacing_over_wavelength},
                   {"coherence_time_s", cfg.system.coherence_time_s},
                   {"tx_power_dbm", cfg.system.tx_power_dbm}};
    j["channel"] = {{"num_paths", cfg.channel.num_paths},
                    {"max_delay_s", cfg.channel.max_delay_s},
                    {"max_subpaths", cfg.channel.max_subpaths},
                    {"aod_lo_deg", cfg.channel.aod_lo_deg},
                    {"aod_hi_deg", cfg.channel.aod_hi_deg},
                    {"path_gain_db", cfg.channel.path_gain_db}};
    j["ofdm"] = {{"subcarriers", cfg.ofdm.subcarriers}, {"cp_len", cfg.ofdm.cp_len}};
    j["sweep"] = {{"variable", cfg.sweep.variable}, {"values", cfg.sweep.values}};
    j["monte_carlo"] = {{"num_channels", cfg.mc.num_channels},
                        {"symbols_per_block", cfg.mc.symbols_per_block},
                        {"papr_blocks_per_channel", cfg.mc.papr_blocks_per_channel},
                        {"empirical_sinr_symbols", cfg.mc.empirical_sinr_symbols},
                        {"ber_blocks", cfg.mc.ber_blocks},
                        {"qam_order", cfg.mc.qam_order},
                        {"base_seed", cfg.mc.base_seed}};
    return j;
}

DerivedConstants derive_constants(const ExperimentConfig& cfg) {
    if (!(cfg.system.bandwidth_hz > 0.0) || !(cfg.system.coherence_time_s > 0.0)) {
        throw ConfigError("derive_constants: bandwidth and coherence time must be positive");
    }
    if (cfg.ofdm.subcarriers < 1) {
        throw ConfigError("derive_constants: need at least one subcarrier");
    }
    if (!(cfg.channel.max_delay_s >= 0.0)) {
        throw ConfigError("derive_constants: delay spread must be non-negative");
    }

    DerivedConstants d;
    d.noise_var_w = dbm_to_watts(cfg.system.noise_psd_dbm_hz) * cfg.system.bandwidth_hz;
    d.sample_period_s = 1.0 / cfg.system.bandwidth_hz;
    d.max_delay_taps = static_cast<int>(
        std::floor(cfg.channel.max_delay_s * cfg.system.bandwidth_hz + kIntegerGuard));
    d.coherence_samples =
        std::llround(cfg.system.bandwidth_hz * cfg.system.coherence_time_s);
    if (d.coherence_samples < 1) {
        throw ConfigError("derive_constants: coherence block shorter than one sample");
    }
    d.cp_len = cfg.ofdm.cp_len < 0 ? d.max_delay_taps : cfg.ofdm.cp_len;
    d.ofdm_symbols_per_coherence = static_cast<int>(
        d.coherence_samples / (cfg.ofdm.subcarriers + d.cp_len));
    d.tx_power_w = dbm_to_watts(cfg.system.tx_power_dbm);
    return d;
}

void cmd_gen_channel(const ExperimentConfig& cfg, const CommandOptions& opts) {
    if (opts.out_path.empty()) {
        throw ConfigError("gen-channel: output path required");
    }
    const DerivedConstants derived = derive_constants(cfg);
    const ChannelConfig ch_cfg = channel_config_for(cfg, derived, cfg.system.num_antennas,
                                                    base_seed_of(cfg, opts));
    const ChannelRealization ch = generate_channel(ch_cfg);

    nlohmann::json j;
    j["schema"] = kChannelFileSchema;
    j["config"] = {{"num_antennas", ch_cfg.geometry.num_antennas},
                   {"spacing_over_wavelength", ch_cfg.geometry.spacing_over_wavelength},
                   {"num_paths", ch_cfg.num_paths},
                   {"max_delay_taps", ch_cfg.max_delay_taps},
                   {"max_subpaths", ch_cfg.max_subpaths},
                   {"aod_lo_deg", ch_cfg.aod_lo_deg},
                   {"aod_hi_deg", ch_cfg.aod_hi_deg},
                   {"path_gain_db", ch_cfg.path_gain_db},
                   {"seed", ch_cfg.seed}};
    j["realization"] = to_json(ch);

    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open output file: " + opts.out_path);
    }
    out << j.dump(2) << "\n";
    std::printf("wrote %s (%d paths, %d antennas)\n", opts.out_path.c_str(), ch.num_paths(),
                ch.num_antennas());
}

void cmd_spectral_efficiency(const ExperimentConfig& cfg, const CommandOptions& opts) {
    if (opts.out_path.empty()) {
        throw ConfigError("spectral-efficiency: output path required");
    }
    const DerivedConstants derived = derive_constants(cfg);
    const std::uint64_t seed = base_seed_of(cfg, opts);
    const std::vector<SweepPoint> points = resolve_sweep(cfg);
    const int k_bins = cfg.ofdm.subcarriers;
    const double noise_var = derived.noise_var_w;

    std::ostringstream tool_line;
    tool_line << "damlink spectral-efficiency profile=" << cfg.profile_name << " seed=" << seed;
    CsvFile summary(opts.out_path, tool_line.str(), opts.deterministic);
    summary.row({"sweep_variable", "sweep_value", "scheme", "beamforming", "n_channels",
                 "m_t", "p_dbm", "mean_sinr_db", "mean_se_bpshz", "overhead"});

    std::unique_ptr<CsvFile> runs_dam;
    std::unique_ptr<CsvFile> runs_ofdm;
    if (!opts.runs_prefix.empty()) {
        runs_dam = std::make_unique<CsvFile>(opts.runs_prefix + "_dam.csv", tool_line.str(),
                                             opts.deterministic);
        runs_dam->row({"run_id", "seed", "beamforming", "m_t", "m_rf", "l", "p_dbm",
                       "sinr_analytic_db", "sinr_empirical_db", "se_bpshz", "overhead"});
        runs_ofdm = std::make_unique<CsvFile>(opts.runs_prefix + "_ofdm.csv", tool_line.str(),
                                              opts.deterministic);
        runs_ofdm->row({"run_id", "seed", "beamforming", "m_t", "m_rf", "l", "p_dbm",
                        "snr_min_db", "snr_median_db", "snr_max_db", "se_bpshz", "overhead"});
    }

    const double dam_overhead = dam_guard_overhead(derived.coherence_samples, derived.max_delay_taps);
    const double ofdm_overhead = ofdm_guard_overhead(
        derived.coherence_samples, derived.ofdm_symbols_per_coherence, derived.cp_len);

    long run_id_dam = 0;
    long run_id_ofdm = 0;
    for (std::size_t ip = 0; ip < points.size(); ++ip) {
        const SweepPoint& pt = points[ip];
        const double power_w = dbm_to_watts(pt.p_dbm);
        const std::uint64_t point_seed = derive_seed(seed, ip);

        std::vector<double> dam_dig_sinr, dam_hyb_sinr, dam_dig_se, dam_hyb_se;
        std::vector<double> ofdm_dig_snr, ofdm_hyb_snr, ofdm_dig_se, ofdm_hyb_se;

        for (int c = 0; c < cfg.mc.num_channels; ++c) {
            const std::uint64_t ch_seed = derive_seed(point_seed, static_cast<std::uint64_t>(c));
            const ChannelConfig ch_cfg = channel_config_for(cfg, derived, pt.num_antennas, ch_seed);
            const ChannelRealization ch = generate_channel(ch_cfg);
            const EffectiveChannelMap map(ch);
            const DelayPlan plan = delay_plan(ch);

            const DamDigitalPrecoder dam_dig = dam_isi_zf(ch, power_w);
            const HybridPrecoder dam_hyb = dam_hybrid(ch, power_w, cfg.system.num_rf_chains);
            const double sinr_dig = analytic_sinr(ch, map, dam_dig.columns, noise_var);
            const double sinr_hyb = analytic_sinr(ch, map, dam_hyb.effective(), noise_var);
            const double se_dig = spectral_efficiency_dam(sinr_dig, derived.coherence_samples,
                                                          derived.max_delay_taps);
            const double se_hyb = spectral_efficiency_dam(sinr_hyb, derived.coherence_samples,
                                                          derived.max_delay_taps);
            dam_dig_sinr.push_back(sinr_dig);
            dam_hyb_sinr.push_back(sinr_hyb);
            dam_dig_se.push_back(se_dig);
            dam_hyb_se.push_back(se_hyb);

            std::string emp_dig = "";
            std::string emp_hyb = "";
            if (cfg.mc.empirical_sinr_symbols > 0) {
                const int s_eff = std::max(cfg.mc.empirical_sinr_symbols,
                                           2 * derived.max_delay_taps + 2);
                Rng sym_rng(derive_seed(ch_seed, 101));
                CVec symbols(s_eff);
                for (int m = 0; m < s_eff; ++m) {
                    symbols(m) = sym_rng.complex_normal(1.0);
                }
                const SimulationResult sim_dig = simulate_link(
                    ch, plan, dam_dig.columns, symbols, noise_var, derive_seed(ch_seed, 102));
                const SimulationResult sim_hyb = simulate_link(
                    ch, plan, dam_hyb.effective(), symbols, noise_var, derive_seed(ch_seed, 103));
                emp_dig = fmt_db(sim_dig.sinr_empirical);
                emp_hyb = fmt_db(sim_hyb.sinr_empirical);
            }

            const OfdmDigitalPrecoder ofdm_dig = ofdm_mrt_waterfill(ch, k_bins, power_w, noise_var);
            const HybridPrecoder ofdm_hyb =
                ofdm_hybrid_from(ofdm_dig, ch, cfg.system.num_rf_chains);
            const std::vector<double> snr_dig =
                per_subcarrier_snr(ch, ofdm_dig.columns, noise_var, k_bins);
            const std::vector<double> snr_hyb =
                per_subcarrier_snr(ch, ofdm_hyb.effective(), noise_var, k_bins);
            const double se_odig =
                spectral_efficiency_ofdm(snr_dig, derived.coherence_samples,
                                         derived.ofdm_symbols_per_coherence, derived.cp_len, k_bins);
            const double se_ohyb =
                spectral_efficiency_ofdm(snr_hyb, derived.coherence_samples,
                                         derived.ofdm_symbols_per_coherence, derived.cp_len, k_bins);
            ofdm_dig_snr.push_back(mean(snr_dig));
            ofdm_hyb_snr.push_back(mean(snr_hyb));
            ofdm_dig_se.push_back(se_odig);
            ofdm_hyb_se.push_back(se_ohyb);

            if (runs_dam) {
                const std::string m_t = std::to_string(pt.num_antennas);
                const std::string m_rf = std::to_string(cfg.system.num_rf_chains);
                const std::string l = std::to_string(cfg.channel.num_paths);
                runs_dam->row({std::to_string(run_id_dam++), std::to_string(ch_seed), "digital",
                               m_t, m_rf, l, fmt_double(pt.p_dbm), fmt_db(sinr_dig), emp_dig,
                               fmt_double(se_dig), fmt_double(dam_overhead)});
                runs_dam->row({std::to_string(run_id_dam++), std::to_string(ch_seed), "hybrid",
                               m_t, m_rf, l, fmt_double(pt.p_dbm), fmt_db(sinr_hyb), emp_hyb,
                               fmt_double(se_hyb), fmt_double(dam_overhead)});
                const auto snr_cells = [](const std::vector<double>& snrs) {
                    const double lo = *std::min_element(snrs.begin(), snrs.end());
                    const double hi = *std::max_element(snrs.begin(), snrs.end());
                    return std::array<std::string, 3>{fmt_db(lo), fmt_db(median_of(snrs)),
                                                      fmt_db(hi)};
                };
                const auto dig_cells = snr_cells(snr_dig);
                const auto hyb_cells = snr_cells(snr_hyb);
                runs_ofdm->row({std::to_string(run_id_ofdm++), std::to_string(ch_seed), "digital",
                                m_t, m_rf, l, fmt_double(pt.p_dbm), dig_cells[0], dig_cells[1],
                                dig_cells[2], fmt_double(se_odig), fmt_double(ofdm_overhead)});
                runs_ofdm->row({std::to_string(run_id_ofdm++), std::to_string(ch_seed), "hybrid",
                                m_t, m_rf, l, fmt_double(pt.p_dbm), hyb_cells[0], hyb_cells[1],
                                hyb_cells[2], fmt_double(se_ohyb), fmt_double(ofdm_overhead)});
            }
        }

        const std::string n_ch = std::to_string(cfg.mc.num_channels);
        const std::string m_t = std::to_string(pt.num_antennas);
        const std::string p_dbm = fmt_double(pt.p_dbm);
        const std::string sv = fmt_double(pt.value);
        summary.row({pt.variable, sv, "dam", "digital", n_ch, m_t, p_dbm,
                     fmt_db(mean(dam_dig_sinr)), fmt_double(mean(dam_dig_se)),
                     fmt_double(dam_overhead)});
        summary.row({pt.variable, sv, "dam", "hybrid", n_ch, m_t, p_dbm,
                     fmt_db(mean(dam_hyb_sinr)), fmt_double(mean(dam_hyb_se)),
                     fmt_double(dam_overhead)});
        summary.row({pt.variable, sv, "ofdm", "digital", n_ch, m_t, p_dbm,
                     fmt_db(mean(ofdm_dig_snr)), fmt_double(mean(ofdm_dig_se)),
                     fmt_double(ofdm_overhead)});
        summary.row({pt.variable, sv, "ofdm", "hybrid", n_ch, m_t, p_dbm,
                     fmt_db(mean(ofdm_hyb_snr)), fmt_double(mean(ofdm_hyb_se)),
                     fmt_double(ofdm_overhead)});
    }
    std::printf("wrote %s (%zu sweep points)\n", opts.out_path.c_str(), points.size());
}

void cmd_ber(const ExperimentConfig& cfg, const CommandOptions& opts) {
    if (opts.out_path.empty()) {
        throw ConfigError("ber: output path required");
    }
    const DerivedConstants derived = derive_constants(cfg);
    if (!cfg.sweep.variable.empty() && cfg.sweep.variable != "p_dbm") {
        throw ConfigError("ber: only transmit power sweeps are supported");
    }
    const std::uint64_t seed = base_seed_of(cfg, opts);
    const std::vector<SweepPoint> points = resolve_sweep(cfg);
    const QamConstellation qam = QamConstellation::make(cfg.mc.qam_order);

    std::ostringstream tool_line;
    tool_line << "damlink ber profile=" << cfg.profile_name << " seed=" << seed
              << " qam=" << cfg.mc.qam_order;
    CsvFile out(opts.out_path, tool_line.str(), opts.deterministic);
    out.row({"scheme", "beamforming", "p_dbm", "snr_point", "value", "n_samples"});

    const struct {
        Scheme scheme;
        Beamforming bf;
        const char* scheme_name;
        const char* bf_name;
    } combos[] = {
        {Scheme::kDam, Beamforming::kDigital, "dam", "digital"},
        {Scheme::kDam, Beamforming::kHybrid, "dam", "hybrid"},
        {Scheme::kOfdm, Beamforming::kDigital, "ofdm", "digital"},
        {Scheme::kOfdm, Beamforming::kHybrid, "ofdm", "hybrid"},
    };

    for (std::size_t ip = 0; ip < points.size(); ++ip) {
        const SweepPoint& pt = points[ip];
        const double power_w = dbm_to_watts(pt.p_dbm);
        for (std::size_t ic = 0; ic < 4; ++ic) {
            LinkDescriptor link;
            link.scheme = combos[ic].scheme;
            link.beamforming = combos[ic].bf;
            link.channel = channel_config_for(cfg, derived, pt.num_antennas, 0);
            link.num_rf_chains = cfg.system.num_rf_chains;
            link.subcarriers = cfg.ofdm.subcarriers;
            link.cp_len = derived.cp_len;
            link.symbols_per_block = cfg.mc.symbols_per_block;
            const std::uint64_t run_seed = derive_seed(seed, ip * 8 + ic);
            const BerResult r = ber_run(link, power_w, derived.noise_var_w, qam,
                                        cfg.mc.ber_blocks, run_seed);
            out.row({combos[ic].scheme_name, combos[ic].bf_name, fmt_double(pt.p_dbm),
                     fmt_double(pt.p_dbm), fmt_double(r.ber()), std::to_string(r.bits_sent)});
        }
    }
    std::printf("wrote %s (%zu power points)\n", opts.out_path.c_str(), points.size());
}

void cmd_papr(const ExperimentConfig& cfg, const CommandOptions& opts) {
    if (opts.out_path.empty()) {
        throw ConfigError("papr: output path required");
    }
    const DerivedConstants derived = derive_constants(cfg);
    const std::uint64_t seed = base_seed_of(cfg, opts);
    const int k_bins = cfg.ofdm.subcarriers;
    const int block_len = k_bins + derived.cp_len;
    const double power_w = derived.tx_power_w;
    const double noise_var = derived.noise_var_w;
    const QamConstellation qam = QamConstellation::make(cfg.mc.qam_order);

    std::vector<double> thresholds_db;
    for (double t = 0.0; t <= 13.0 + 1e-9; t += 0.25) {
        thresholds_db.push_back(t);
    }

    std::ostringstream tool_line;
    tool_line << "damlink papr profile=" << cfg.profile_name << " seed=" << seed
              << " qam=" << cfg.mc.qam_order;
    CsvFile out(opts.out_path, tool_line.str(), opts.deterministic);
    out.row({"scheme", "beamforming", "p_dbm", "threshold_db", "value", "n_samples"});

    const struct {
        Scheme scheme;
        Beamforming bf;
        const char* scheme_name;
        const char* bf_name;
    } combos[] = {
        {Scheme::kDam, Beamforming::kDigital, "dam", "digital"},
        {Scheme::kDam, Beamforming::kHybrid, "dam", "hybrid"},
        {Scheme::kOfdm, Beamforming::kDigital, "ofdm", "digital"},
        {Scheme::kOfdm, Beamforming::kHybrid, "ofdm", "hybrid"},
    };

    for (std::size_t ic = 0; ic < 4; ++ic) {
        const std::uint64_t combo_seed = derive_seed(seed, 1000 + ic);
        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(cfg.mc.num_channels) *
                        static_cast<std::size_t>(cfg.mc.papr_blocks_per_channel));

        for (int c = 0; c < cfg.mc.num_channels; ++c) {
            const std::uint64_t ch_seed = derive_seed(combo_seed, static_cast<std::uint64_t>(c));
            const ChannelConfig ch_cfg =
                channel_config_for(cfg, derived, cfg.system.num_antennas, ch_seed);
            const ChannelRealization ch = generate_channel(ch_cfg);
            Rng data_rng(derive_seed(ch_seed, 7));

            if (combos[ic].scheme == Scheme::kDam) {
                const DelayPlan plan = delay_plan(ch);
                CMat columns;
                if (combos[ic].bf == Beamforming::kDigital) {
                    columns = dam_isi_zf(ch, power_w).columns;
                } else {
                    columns = dam_hybrid(ch, power_w, cfg.system.num_rf_chains).effective();
                }
                // One long steady-state run per channel, cut into blocks of
                // the OFDM symbol length so both schemes are compared on
                // equal window sizes.
                const int s_total =
                    cfg.mc.papr_blocks_per_channel * block_len + plan.n_span;
                std::vector<std::uint8_t> bits(
                    static_cast<std::size_t>(s_total) *
                    static_cast<std::size_t>(qam.bits_per_symbol()));
                for (std::uint8_t& b : bits) {
                    b = static_cast<std::uint8_t>(data_rng.uniform_int(0, 1));
                }
                const CVec symbols = qam.map_bits(bits);
                const CMat x = synthesize_tx(plan, columns, symbols);
                for (int b = 0; b < cfg.mc.papr_blocks_per_channel; ++b) {
                    samples.push_back(
                        papr(x.middleCols(plan.n_span + b * block_len, block_len)));
                }
            } else {
                CMat columns;
                if (combos[ic].bf == Beamforming::kDigital) {
                    columns = ofdm_mrt_waterfill(ch, k_bins, power_w, noise_var).columns;
                } else {
                    columns =
                        ofdm_hybrid(ch, k_bins, power_w, noise_var, cfg.system.num_rf_chains)
                            .effective();
                }
                const OfdmParams params{k_bins, derived.cp_len};
                std::vector<std::uint8_t> bits(
                    static_cast<std::size_t>(k_bins) *
                    static_cast<std::size_t>(qam.bits_per_symbol()));
                for (int b = 0; b < cfg.mc.papr_blocks_per_channel; ++b) {
                    for (std::uint8_t& bit : bits) {
                        bit = static_cast<std::uint8_t>(data_rng.uniform_int(0, 1));
                    }
                    const CMat symbols = qam.map_bits(bits).transpose();
                    samples.push_back(papr(ofdm_modulate(columns, symbols, params)));
                }
            }
        }

        const std::vector<double> curve = ccdf(samples, thresholds_db);
        for (std::size_t t = 0; t < thresholds_db.size(); ++t) {
            out.row({combos[ic].scheme_name, combos[ic].bf_name,
                     fmt_double(cfg.system.tx_power_dbm), fmt_double(thresholds_db[t]),
                     fmt_double(curve[t]), std::to_string(samples.size())});
        }
    }
    std::printf("wrote %s\n", opts.out_path.c_str());
}

}  // namespace damlink
