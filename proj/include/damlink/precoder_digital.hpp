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

#include <vector>

#include <json.hpp>

#include "damlink/channel.hpp"
#include "damlink/numerics.hpp"

namespace damlink {

// Fully digital per-path precoder for the delay-aligned transmitter.
// Column l carries the beamforming vector applied to the symbol stream
// pre-shifted for path l; the power budget is absorbed into the columns.
struct DamDigitalPrecoder {
    CMat columns;          // num_antennas x num_paths
    double total_power = 0.0;
    // Sum over paths of |Q_l h_l|^2 with Q_l the projector onto the
    // complement of the other paths' span. The zero-interference receive
    // SNR equals total_power / noise_var * zf_gain_sum.
    double zf_gain_sum = 0.0;
};

// Interference-free per-path beamforming: each column is the path vector
// projected away from the span of all other path vectors,
//   f_l = sqrt(P) Q_l h_l / sqrt(sum_l' |Q_l' h_l'|^2),
// which zero-forces every cross-path tap while spending total power P.
// Throws RankDeficientError when the path vectors are linearly dependent.
DamDigitalPrecoder dam_isi_zf(const ChannelRealization& ch, double power);

// Water-filling split of a total power budget across K parallel
// subchannels with per-unit-power SNRs gain_sq[k] * K / noise_var.
struct Waterfill {
    std::vector<double> powers;  // p_k >= 0, sums to the budget
    double water_level = 0.0;
};

// Solves max sum_k log2(1 + K p_k gain_sq[k] / noise_var) subject to
// sum p_k == power, p_k >= 0, by bisection on the water level. The
// returned powers sum to the budget within 1e-9 relative. Throws
// DomainError for a non-positive budget or noise variance and
// DegenerateChannelError when every gain is zero.
Waterfill waterfill_power_allocation(const std::vector<double>& gain_sq,
                                     double power, double noise_var);

// Fully digital per-subcarrier OFDM precoder: matched direction on every
// bin, water-filling across bins.
struct OfdmDigitalPrecoder {
    CMat columns;                // num_antennas x K, column k = u_k
    std::vector<double> powers;  // per-bin transmit powers p_k
    double water_level = 0.0;
    double total_power = 0.0;
};

// Builds the rate-optimal digital OFDM precoder for the given channel:
// u_k = sqrt(p_k) h[k] / |h[k]| with p_k from water-filling. Requires
// k_bins > n_max (frequency response domain) and positive power and
// noise variance.
OfdmDigitalPrecoder ofdm_mrt_waterfill(const ChannelRealization& ch, int k_bins,
                                       double power, double noise_var);

nlohmann::json to_json(const DamDigitalPrecoder& p);
nlohmann::json to_json(const OfdmDigitalPrecoder& p);
DamDigitalPrecoder dam_digital_from_json(const nlohmann::json& j);
OfdmDigitalPrecoder ofdm_digital_from_json(const nlohmann::json& j);

}  // namespace damlink
