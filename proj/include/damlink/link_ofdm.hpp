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
#include "damlink/precoder_digital.hpp"
#include "damlink/precoder_hybrid.hpp"
#include "damlink/rng.hpp"

namespace damlink {

struct OfdmParams {
    int subcarriers = 0;  // K
    int cp_len = 0;       // cyclic prefix length in samples
};

// MIMO-OFDM transmit block: for each OFDM symbol m the per-antenna time
// signal is the unitary forward DFT of the precoded spectrum
// {u_k s[m,k]}_k, preceded by its last cp_len samples as cyclic prefix.
// The forward transform on the synthesis side pairs with the conjugating
// receive combining of convolve() so that subcarrier k rides on the same
// delay phasor exp(-j 2 pi k n_l / K) that frequency_response() assigns
// to it. symbols is n_sym x K; the result is
// num_antennas x n_sym*(K + cp_len). Throws ConfigError for K < 1 or
// cp_len < 0, LengthError on a symbol/precoder column mismatch.
CMat ofdm_modulate(const CMat& precoder_columns, const CMat& symbols,
                   const OfdmParams& params);

// Receiver chain for the scalar output stream of convolve(): adds white
// noise of variance noise_var per time sample (drawn from rng in sample
// order), strips each cyclic prefix, and applies the unitary inverse DFT.
// Returns the n_sym x K received symbols
//   y[m,k] = sqrt(K) h[k]^H u_k s[m,k] + z[m,k],  z white CN(0, noise_var).
// Throws CpTooShortError when cp_len < n_max of the channel, LengthError
// when received holds less than one OFDM symbol.
CMat ofdm_demodulate(const CVec& received, const ChannelRealization& ch,
                     const OfdmParams& params, double noise_var, Rng& rng);

// Post-combining SNR of every subcarrier, gamma_k = K |h[k]^H u_k|^2 /
// noise_var, for any precoder with columns u_k.
std::vector<double> per_subcarrier_snr(const ChannelRealization& ch,
                                       const CMat& precoder_columns,
                                       double noise_var, int k_bins);

// Fraction of a coherence block consumed by cyclic prefixes when n_sym
// OFDM symbols, each carrying guard_taps prefix samples, fit into
// coherence_samples.
double ofdm_guard_overhead(std::int64_t coherence_samples, int n_sym,
                           int guard_taps);

// Effective spectral efficiency net of prefix overhead,
//   (1 - overhead) * (1/K) sum_k log2(1 + gamma_k).
// k_bins must equal snrs.size() (LengthError otherwise); throws
// DomainError when the overhead reaches or exceeds the whole block.
double spectral_efficiency_ofdm(const std::vector<double>& snrs,
                                std::int64_t coherence_samples, int n_sym,
                                int guard_taps, int k_bins);

}  // namespace damlink
