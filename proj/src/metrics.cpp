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

#include "damlink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "damlink/errors.hpp"
#include "damlink/link_dam.hpp"
#include "damlink/link_ofdm.hpp"
#include "damlink/precoder_digital.hpp"
#include "damlink/precoder_hybrid.hpp"

namespace damlink {

namespace {

std::uint32_t gray_encode(std::uint32_t value) { return value ^ (value >> 1); }

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

QamConstellation QamConstellation::make(int order) {
    if (!is_power_of_two(order) || order < 4 || order > 256) {
        throw ConfigError("qam: order must be a power of two in [4, 256]");
    }
    QamConstellation qam;
    qam.order_ = order;
    int bps = 0;
    for (int v = order; v > 1; v >>= 1) {
        ++bps;
    }
    qam.bits_per_symbol_ = bps;
    qam.points_.assign(static_cast<std::size_t>(order), Complex(0.0, 0.0));

    // All orders start from a Gray-labeled rectangle of 2^ceil(b/2) by
    // 2^floor(b/2) amplitude levels. Even orders are square already; odd
    // orders (32, 128) fold the outermost columns into caps above and
    // below the central band, yielding the cross shape. 8 stays a plain
    // rectangle (a 4-point cross does not exist).
    const int bits_i = (bps + 1) / 2;
    const int bits_q = bps / 2;
    const int side_i = 1 << bits_i;
    const int side_q = 1 << bits_q;
    const bool fold = (bps % 2 == 1) && order >= 32;
    const int band_limit = 3 * side_i / 4 - 1;   // largest |x| kept in place
    const int fold_shift = side_i / 4;           // wing |x| minus cap |y|

    double energy_sum = 0.0;
    for (int u = 0; u < side_i; ++u) {
        for (int v = 0; v < side_q; ++v) {
            double x = static_cast<double>(2 * u - (side_i - 1));
            double y = static_cast<double>(2 * v - (side_q - 1));
            if (fold && std::abs(x) > static_cast<double>(band_limit)) {
                const double wing_x = x;
                x = (wing_x > 0.0 ? 1.0 : -1.0) * std::abs(y);
                y = (y > 0.0 ? 1.0 : -1.0) * (std::abs(wing_x) - fold_shift);
            }
            const std::uint32_t label =
                (gray_encode(static_cast<std::uint32_t>(u)) << bits_q) |
                gray_encode(static_cast<std::uint32_t>(v));
            qam.points_[label] = Complex(x, y);
            energy_sum += x * x + y * y;
        }
    }
    const double scale = std::sqrt(static_cast<double>(order) / energy_sum);
    for (Complex& p : qam.points_) {
        p *= scale;
    }
    return qam;
}

Complex QamConstellation::map_symbol(std::uint32_t label) const {
    if (label >= static_cast<std::uint32_t>(order_)) {
        throw DomainError("qam: label out of range");
    }
    return points_[label];
}

std::uint32_t QamConstellation::demap_symbol(Complex received) const {
    std::uint32_t best = 0;
    double best_dist = std::norm(received - points_[0]);
    for (std::uint32_t label = 1; label < static_cast<std::uint32_t>(order_); ++label) {
        const double dist = std::norm(received - points_[label]);
        if (dist < best_dist) {
            best_dist = dist;
            best = label;
        }
    }
    return best;
}

CVec QamConstellation::map_bits(const std::vector<std::uint8_t>& bits) const {
    if (bits.size() % static_cast<std::size_t>(bits_per_symbol_) != 0) {
        throw LengthError("qam: bit count is not a multiple of bits per symbol");
    }
    const std::size_t n_sym = bits.size() / static_cast<std::size_t>(bits_per_symbol_);
    CVec symbols(static_cast<Eigen::Index>(n_sym));
    for (std::size_t s = 0; s < n_sym; ++s) {
        std::uint32_t label = 0;
        for (int b = 0; b < bits_per_symbol_; ++b) {
            label = (label << 1) | (bits[s * static_cast<std::size_t>(bits_per_symbol_) +
                                         static_cast<std::size_t>(b)] & 1u);
        }
        symbols(static_cast<Eigen::Index>(s)) = points_[label];
    }
    return symbols;
}

std::vector<std::uint8_t> QamConstellation::demap_symbols(const CVec& symbols) const {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(symbols.size()) *
                                   static_cast<std::size_t>(bits_per_symbol_));
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        const std::uint32_t label = demap_symbol(symbols(s));
        for (int b = 0; b < bits_per_symbol_; ++b) {
            bits[static_cast<std::size_t>(s) * static_cast<std::size_t>(bits_per_symbol_) +
                 static_cast<std::size_t>(b)] =
                static_cast<std::uint8_t>((label >> (bits_per_symbol_ - 1 - b)) & 1u);
        }
    }
    return bits;
}

std::vector<double> papr_per_antenna(const CMat& block) {
    std::vector<double> out(static_cast<std::size_t>(block.rows()), 0.0);
    for (Eigen::Index a = 0; a < block.rows(); ++a) {
        double peak = 0.0;
        double sum = 0.0;
        for (Eigen::Index n = 0; n < block.cols(); ++n) {
            const double p = std::norm(block(a, n));
            peak = std::max(peak, p);
            sum += p;
        }
        if (sum > 0.0) {
            out[static_cast<std::size_t>(a)] =
                peak * static_cast<double>(block.cols()) / sum;
        }
    }
    return out;
}

double papr(const CMat& block) {
    if (block.size() == 0) {
        throw DegenerateSignalError("papr: empty block");
    }
    const std::vector<double> ratios = papr_per_antenna(block);
    const double worst = *std::max_element(ratios.begin(), ratios.end());
    if (worst == 0.0) {
        throw DegenerateSignalError("papr: block carries no energy");
    }
    return worst;
}

std::vector<double> ccdf(const std::vector<double>& samples,
                         const std::vector<double>& thresholds_db) {
    if (samples.empty()) {
        throw DomainError("ccdf: no samples");
    }
    std::vector<double> out;
    out.reserve(thresholds_db.size());
    for (double threshold_db : thresholds_db) {
        const double threshold = std::pow(10.0, threshold_db / 10.0);
        std::size_t count = 0;
        for (double s : samples) {
            if (s > threshold) {
                ++count;
            }
        }
        out.push_back(static_cast<double>(count) / static_cast<double>(samples.size()));
    }
    return out;
}

namespace {

BerResult ber_block_dam(const LinkDescriptor& link, double power, double noise_var,
                        const QamConstellation& qam, std::uint64_t block_seed) {
    ChannelConfig cfg = link.channel;
    cfg.seed = derive_seed(block_seed, 0);
    const ChannelRealization ch = generate_channel(cfg);
    const DelayPlan plan = delay_plan(ch);

    CMat columns;
    if (link.beamforming == Beamforming::kDigital) {
        columns = dam_isi_zf(ch, power).columns;
    } else {
        columns = dam_hybrid(ch, power, link.num_rf_chains).effective();
    }

    Rng bit_rng(derive_seed(block_seed, 1));
    const int bps = qam.bits_per_symbol();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(link.symbols_per_block) *
                                   static_cast<std::size_t>(bps));
    for (std::uint8_t& b : bits) {
        b = static_cast<std::uint8_t>(bit_rng.uniform_int(0, 1));
    }
    const CVec symbols = qam.map_bits(bits);

    const SimulationResult sim =
        simulate_link(ch, plan, columns, symbols, noise_var, derive_seed(block_seed, 2));

    Complex gain(0.0, 0.0);
    for (int l = 0; l < ch.num_paths(); ++l) {
        gain += ch.path_matrix().col(l).dot(columns.col(l));
    }

    CVec equalized(symbols.size());
    if (std::norm(gain) > 0.0) {
        equalized = sim.received / gain;
    } else {
        equalized.setZero();
    }
    const std::vector<std::uint8_t> decided = qam.demap_symbols(equalized);

    BerResult result;
    result.bits_sent = bits.size();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        result.bit_errors += (bits[i] != decided[i]) ? 1u : 0u;
    }
    return result;
}

BerResult ber_block_ofdm(const LinkDescriptor& link, double power, double noise_var,
                         const QamConstellation& qam, std::uint64_t block_seed) {
    ChannelConfig cfg = link.channel;
    cfg.seed = derive_seed(block_seed, 0);
    const ChannelRealization ch = generate_channel(cfg);
    const int k_bins = link.subcarriers;

    const OfdmDigitalPrecoder digital = ofdm_mrt_waterfill(ch, k_bins, power, noise_var);
    CMat columns;
    if (link.beamforming == Beamforming::kDigital) {
        columns = digital.columns;
    } else {
        columns = ofdm_hybrid_from(digital, ch, link.num_rf_chains).effective();
    }

    // Only bins that received water-filling power carry data.
    std::vector<int> active;
    for (int k = 0; k < k_bins; ++k) {
        if (digital.powers[static_cast<std::size_t>(k)] > 0.0) {
            active.push_back(k);
        }
    }
    BerResult result;
    if (active.empty()) {
        return result;
    }

    const int bps = qam.bits_per_symbol();
    const int n_sym = link.symbols_per_block;
    Rng bit_rng(derive_seed(block_seed, 1));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_sym) * active.size() *
                                   static_cast<std::size_t>(bps));
    for (std::uint8_t& b : bits) {
        b = static_cast<std::uint8_t>(bit_rng.uniform_int(0, 1));
    }
    const CVec mapped = qam.map_bits(bits);

    CMat symbols = CMat::Zero(n_sym, k_bins);
    Eigen::Index cursor = 0;
    for (int m = 0; m < n_sym; ++m) {
        for (int k : active) {
            symbols(m, k) = mapped(cursor++);
        }
    }

    const OfdmParams params{k_bins, link.cp_len};
    const CMat x = ofdm_modulate(columns, symbols, params);
    const CVec clean = convolve(ch, x);
    Rng noise_rng(derive_seed(block_seed, 2));
    const CMat received = ofdm_demodulate(clean, ch, params, noise_var, noise_rng);

    // Genie one-tap gains sqrt(K) h[k]^H u_k.
    const CMat freq = frequency_response(ch, k_bins);
    const double root_k = std::sqrt(static_cast<double>(k_bins));
    std::vector<Complex> gains(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
        gains[i] = root_k * freq.col(active[i]).dot(columns.col(active[i]));
    }

    CVec equalized(mapped.size());
    cursor = 0;
    for (int m = 0; m < n_sym; ++m) {
        for (std::size_t i = 0; i < active.size(); ++i) {
            const Complex g = gains[i];
            equalized(cursor++) = std::norm(g) > 0.0
                                      ? received(m, active[i]) / g
                                      : Complex(0.0, 0.0);
        }
    }
    const std::vector<std::uint8_t> decided = qam.demap_symbols(equalized);

    result.bits_sent = bits.size();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        result.bit_errors += (bits[i] != decided[i]) ? 1u : 0u;
    }
    return result;
}

}  // namespace

BerResult ber_run(const LinkDescriptor& link, double power, double noise_var,
                  const QamConstellation& qam, int num_blocks, std::uint64_t seed) {
    if (num_blocks < 1) {
        throw ConfigError("ber_run: need at least one block");
    }
    if (link.symbols_per_block < 1) {
        throw ConfigError("ber_run: need at least one symbol per block");
    }
    if (link.scheme == Scheme::kDam &&
        link.symbols_per_block <= link.channel.max_delay_taps) {
        throw ConfigError("ber_run: symbol block must exceed the channel span");
    }
    if (link.scheme == Scheme::kOfdm && link.subcarriers < 1) {
        throw ConfigError("ber_run: subcarrier count required");
    }

    // Each block is a pure function of its derived seed; blocks are
    // striped across workers and reduced by exact integer sums, so the
    // totals do not depend on the worker count.
    std::vector<BerResult> per_block(static_cast<std::size_t>(num_blocks));
    const auto run_range = [&](int first, int stride) {
        for (int b = first; b < num_blocks; b += stride) {
            const std::uint64_t block_seed = derive_seed(seed, static_cast<std::uint64_t>(b));
            per_block[static_cast<std::size_t>(b)] =
                link.scheme == Scheme::kDam
                    ? ber_block_dam(link, power, noise_var, qam, block_seed)
                    : ber_block_ofdm(link, power, noise_var, qam, block_seed);
        }
    };

    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = std::max(1, std::min<int>(static_cast<int>(hw), num_blocks));
    if (workers == 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(run_range, w, workers);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    BerResult total;
    for (const BerResult& r : per_block) {
        total.bit_errors += r.bit_errors;
        total.bits_sent += r.bits_sent;
    }
    return total;
}

}  // namespace damlink
