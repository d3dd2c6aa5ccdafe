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

namespace damlink {

// Per-path transmit advances: path l gets kappa_l = n_max - n_l, so every
// pre-shifted stream arrives aligned at lag n_max.
struct DelayPlan {
    std::vector<int> kappas;
    int n_min = 0;
    int n_max = 0;
    int n_span = 0;
};

DelayPlan delay_plan(const ChannelRealization& ch);

// Delay-aligned transmit block for one symbol vector s of length S:
//   x[n] = sum_l f_l s[n - kappa_l],
// returned as num_antennas x (S + n_max). Columns beyond S + n_span are
// zero when the earliest path has a positive delay. Average per-sample
// transmit power converges to |F|_F^2 for unit-power symbols.
CMat synthesize_tx(const DelayPlan& plan, const CMat& path_precoder,
                   const CVec& symbols);
CMat synthesize_tx(const DelayPlan& plan, const DamDigitalPrecoder& p,
                   const CVec& symbols);
CMat synthesize_tx(const DelayPlan& plan, const HybridPrecoder& p,
                   const CVec& symbols);

// After delay pre-compensation the cascade of plan and channel collapses,
// at receiver lag n_max + i, to the composite tap sum_l' g_l'[i]^H f_l'
// where g_l'[i] is the path vector h_l of the unique path l with
// n_l' - n_l = i, when one exists. This map stores that pairing: entry
// (i, l') is the index l, or -1 when no path is at that distance.
class EffectiveChannelMap {
  public:
    explicit EffectiveChannelMap(const ChannelRealization& ch);

    int num_paths() const { return num_paths_; }
    int n_span() const { return n_span_; }

    // Path index l with n_source - n_l == diff, or -1. diff in
    // [-n_span, n_span].
    int interfered_path(int diff, int source) const;

    // Spatial vector g_source[diff]: the matched path vector, or zero.
    CVec g_vector(const ChannelRealization& ch, int diff, int source) const;

  private:
    int num_paths_ = 0;
    int n_span_ = 0;
    std::vector<int> table_;  // (2 n_span + 1) x num_paths, row-major in diff
};

// Noise-free composite gains of the aligned link: the desired tap
// gain = sum_l h_l^H f_l at lag n_max, and the residual tap powers
// isi_power = sum_{i != 0} |sum_l' g_l'[i]^H f_l'|^2. Terms accumulate in
// ascending diff order, inner sum in ascending path order.
struct LinkGains {
    Complex gain;
    double signal_power = 0.0;
    double isi_power = 0.0;
};

LinkGains analytic_link_gains(const ChannelRealization& ch,
                              const EffectiveChannelMap& map,
                              const CMat& path_precoder);

// Receive SINR signal_power / (isi_power + noise_var) implied by the
// composite taps.
double analytic_sinr(const ChannelRealization& ch, const EffectiveChannelMap& map,
                     const CMat& path_precoder, double noise_var);
double analytic_sinr(const ChannelRealization& ch, const EffectiveChannelMap& map,
                     const DamDigitalPrecoder& p, double noise_var);
double analytic_sinr(const ChannelRealization& ch, const EffectiveChannelMap& map,
                     const HybridPrecoder& p, double noise_var);

// Monte Carlo pass of one symbol block through synthesis, the tap channel,
// and additive noise. Empirical powers are measured on the aligned sample
// window with the first and last n_span symbols excluded, separating the
// desired tap, residual taps, and noise exactly.
struct SimulationResult {
    CVec received;                // aligned samples, index m receives s[m]
    double desired_power = 0.0;
    double isi_power = 0.0;
    double noise_power = 0.0;
    double sinr_empirical = 0.0;
};

SimulationResult simulate_link(const ChannelRealization& ch, const DelayPlan& plan,
                               const CMat& path_precoder, const CVec& symbols,
                               double noise_var, std::uint64_t seed);

// Fraction of a coherence block consumed by the alignment guards: one
// span of max_delay_taps on each side.
double dam_guard_overhead(std::int64_t coherence_samples, int max_delay_taps);

// Effective spectral efficiency net of guard overhead,
//   (1 - overhead) * log2(1 + sinr).
double spectral_efficiency_dam(double sinr, std::int64_t coherence_samples,
                               int max_delay_taps);

}  // namespace damlink
