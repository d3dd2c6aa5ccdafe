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

#include "damlink/link_ofdm.hpp"

#include <cmath>

#include "damlink/errors.hpp"

namespace damlink {

namespace {

void validate_params(const OfdmParams& params) {
    if (params.subcarriers < 1) {
        throw ConfigError("ofdm: subcarriers must be >= 1");
    }
    if (params.cp_len < 0) {
        throw ConfigError("ofdm: cyclic prefix length must be >= 0");
    }
}

}  // namespace

CMat ofdm_modulate(const CMat& precoder_columns, const CMat& symbols,
                   const OfdmParams& params) {
    validate_params(params);
    const Eigen::Index k_bins = params.subcarriers;
    if (precoder_columns.cols() != k_bins) {
        throw LengthError("ofdm_modulate: one precoder column per subcarrier required");
    }
    if (symbols.cols() != k_bins) {
        throw LengthError("ofdm_modulate: one symbol per subcarrier required");
    }

    const Eigen::Index num_antennas = precoder_columns.rows();
    const Eigen::Index n_sym = symbols.rows();
    const Eigen::Index block = k_bins + params.cp_len;
    CMat x(num_antennas, n_sym * block);
    CVec spectrum(k_bins);
    for (Eigen::Index m = 0; m < n_sym; ++m) {
        for (Eigen::Index a = 0; a < num_antennas; ++a) {
            for (Eigen::Index k = 0; k < k_bins; ++k) {
                spectrum(k) = precoder_columns(a, k) * symbols(m, k);
            }
            const CVec time = dft(spectrum);
            // Cyclic prefix: the tail of the symbol repeated up front.
            for (Eigen::Index n = 0; n < params.cp_len; ++n) {
                x(a, m * block + n) = time(k_bins - params.cp_len + n);
            }
            for (Eigen::Index n = 0; n < k_bins; ++n) {
                x(a, m * block + params.cp_len + n) = time(n);
            }
        }
    }
    return x;
}

CMat ofdm_demodulate(const CVec& received, const ChannelRealization& ch,
                     const OfdmParams& params, double noise_var, Rng& rng) {
    validate_params(params);
    if (params.cp_len < ch.n_max()) {
        throw CpTooShortError("ofdm_demodulate: cyclic prefix shorter than the channel memory");
    }
    if (noise_var < 0.0) {
        throw DomainError("ofdm_demodulate: negative noise variance");
    }
    const Eigen::Index k_bins = params.subcarriers;
    const Eigen::Index block = k_bins + params.cp_len;
    const Eigen::Index n_sym = received.size() / block;
    if (n_sym < 1) {
        throw LengthError("ofdm_demodulate: received stream shorter than one OFDM symbol");
    }

    CVec noisy = received;
    if (noise_var > 0.0) {
        // One draw per time-domain sample, in sample order, including the
        // prefix samples that are subsequently discarded.
        for (Eigen::Index n = 0; n < n_sym * block; ++n) {
            noisy(n) += rng.complex_normal(noise_var);
        }
    }

    CMat out(n_sym, k_bins);
    for (Eigen::Index m = 0; m < n_sym; ++m) {
        const CVec window = noisy.segment(m * block + params.cp_len, k_bins);
        out.row(m) = idft(window).transpose();
    }
    return out;
}

std::vector<double> per_subcarrier_snr(const ChannelRealization& ch,
                                       const CMat& precoder_columns, double noise_var,
                                       int k_bins) {
    if (!(noise_var > 0.0)) {
        throw DomainError("per_subcarrier_snr: noise variance must be positive");
    }
    if (precoder_columns.cols() != k_bins) {
        throw LengthError("per_subcarrier_snr: one precoder column per subcarrier required");
    }
    const CMat freq = frequency_response(ch, k_bins);
    std::vector<double> snrs(static_cast<std::size_t>(k_bins));
    const double scale = static_cast<double>(k_bins) / noise_var;
    for (int k = 0; k < k_bins; ++k) {
        snrs[static_cast<std::size_t>(k)] = scale * std::norm(freq.col(k).dot(precoder_columns.col(k)));
    }
    return snrs;
}

double ofdm_guard_overhead(std::int64_t coherence_samples, int n_sym, int guard_taps) {
    if (coherence_samples <= 0 || n_sym < 0 || guard_taps < 0) {
        throw DomainError("ofdm_guard_overhead: invalid sample counts");
    }
    const double overhead = static_cast<double>(n_sym) * static_cast<double>(guard_taps) /
                            static_cast<double>(coherence_samples);
    if (overhead >= 1.0) {
        throw DomainError("ofdm_guard_overhead: prefixes exceed the coherence block");
    }
    return overhead;
}

double spectral_efficiency_ofdm(const std::vector<double>& snrs,
                                std::int64_t coherence_samples, int n_sym, int guard_taps,
                                int k_bins) {
    if (static_cast<int>(snrs.size()) != k_bins) {
        throw LengthError("spectral_efficiency_ofdm: SNR list length must equal the bin count");
    }
    if (k_bins < 1) {
        throw DomainError("spectral_efficiency_ofdm: need at least one subcarrier");
    }
    const double overhead = ofdm_guard_overhead(coherence_samples, n_sym, guard_taps);
    double sum = 0.0;
    for (double snr : snrs) {
        if (snr < 0.0) {
            throw DomainError("spectral_efficiency_ofdm: negative SNR");
        }
        sum += std::log2(1.0 + snr);
    }
    return (1.0 - overhead) * sum / static_cast<double>(k_bins);
}

}  // namespace damlink
