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
#include <vector>

#include "damlink/channel.hpp"
#include "damlink/numerics.hpp"
#include "damlink/rng.hpp"

namespace damlink {

// Gray-labeled QAM constellation with unit average symbol energy.
// Square orders (4, 16, 64, 256) use an independent Gray code per axis.
// Non-square orders use the rectangle construction: 8 is a Gray-labeled
// 4x2 rectangle; 32 and 128 fold the outer columns of a Gray-labeled
// 2^((b+1)/2) x 2^((b-1)/2) rectangle into top and bottom caps, giving
// the cross shape with quasi-Gray labels.
class QamConstellation {
  public:
    // order must be a power of two in [4, 256]; throws ConfigError.
    static QamConstellation make(int order);

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_per_symbol_; }
    const std::vector<Complex>& points() const { return points_; }

    Complex map_symbol(std::uint32_t label) const;
    // Nearest constellation point in Euclidean distance; lowest label on
    // exact ties.
    std::uint32_t demap_symbol(Complex received) const;

    // Bit-vector interfaces; bits are 0/1 bytes, most significant bit of
    // each label first. map_bits throws LengthError when bits.size() is
    // not a multiple of bits_per_symbol().
    CVec map_bits(const std::vector<std::uint8_t>& bits) const;
    std::vector<std::uint8_t> demap_symbols(const CVec& symbols) const;

  private:
    QamConstellation() = default;

    int order_ = 0;
    int bits_per_symbol_ = 0;
    std::vector<Complex> points_;  // indexed by label
};

// Peak-to-average power ratio per antenna over one signal block: the
// maximum instantaneous power divided by the block's own mean power.
// Antennas with zero mean power report 0.
std::vector<double> papr_per_antenna(const CMat& block);

// Block PAPR: the worst antenna's ratio. Throws DegenerateSignalError
// when every antenna is silent.
double papr(const CMat& block);

// Empirical complementary CDF of PAPR samples (linear ratios) evaluated
// at thresholds given in dB. Throws DomainError when samples is empty.
std::vector<double> ccdf(const std::vector<double>& samples,
                         const std::vector<double>& thresholds_db);

enum class Scheme { kDam, kOfdm };
enum class Beamforming { kDigital, kHybrid };

// End-to-end link under test for bit-error-rate measurement. Each block
// draws a fresh channel, builds the selected precoder, passes random
// QAM symbols through synthesis, the tap channel, and noise, and counts
// errors after genie-gain equalization (the composite one-tap gain is
// assumed known at the receiver).
struct LinkDescriptor {
    Scheme scheme = Scheme::kDam;
    Beamforming beamforming = Beamforming::kDigital;
    ChannelConfig channel;       // per-block seed field is overwritten
    int num_rf_chains = 1;
    int subcarriers = 0;         // OFDM only
    int cp_len = 0;              // OFDM only
    int symbols_per_block = 0;   // DAM: symbols; OFDM: OFDM symbols
};

struct BerResult {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_sent = 0;

    double ber() const {
        return bits_sent == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits_sent);
    }
};

// Runs num_blocks independent blocks and accumulates exact integer error
// counts. Block b derives its channel and data seeds from (seed, b), so
// the result is a pure function of the arguments regardless of how
// blocks are scheduled across worker threads.
BerResult ber_run(const LinkDescriptor& link, double power, double noise_var,
                  const QamConstellation& qam, int num_blocks,
                  std::uint64_t seed);

}  // namespace damlink
