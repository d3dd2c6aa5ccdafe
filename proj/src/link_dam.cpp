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

#include "damlink/link_dam.hpp"

#include <cmath>
#include <limits>

#include "damlink/errors.hpp"

namespace damlink {

DelayPlan delay_plan(const ChannelRealization& ch) {
    DelayPlan plan;
    plan.n_min = ch.n_min();
    plan.n_max = ch.n_max();
    plan.n_span = ch.n_span();
    plan.kappas.reserve(static_cast<std::size_t>(ch.num_paths()));
    for (int delay : ch.delays()) {
        plan.kappas.push_back(plan.n_max - delay);
    }
    return plan;
}

CMat synthesize_tx(const DelayPlan& plan, const CMat& path_precoder, const CVec& symbols) {
    const Eigen::Index num_paths = static_cast<Eigen::Index>(plan.kappas.size());
    if (path_precoder.cols() != num_paths) {
        throw LengthError("synthesize_tx: one precoder column per path required");
    }
    const Eigen::Index s = symbols.size();
    if (s < 1) {
        throw LengthError("synthesize_tx: empty symbol block");
    }
    CMat x = CMat::Zero(path_precoder.rows(), s + plan.n_max);
    for (Eigen::Index l = 0; l < num_paths; ++l) {
        x.middleCols(plan.kappas[static_cast<std::size_t>(l)], s).noalias() +=
            path_precoder.col(l) * symbols.transpose();
    }
    return x;
}

CMat synthesize_tx(const DelayPlan& plan, const DamDigitalPrecoder& p, const CVec& symbols) {
    return synthesize_tx(plan, p.columns, symbols);
}

CMat synthesize_tx(const DelayPlan& plan, const HybridPrecoder& p, const CVec& symbols) {
    return synthesize_tx(plan, p.effective(), symbols);
}

EffectiveChannelMap::EffectiveChannelMap(const ChannelRealization& ch)
    : num_paths_(ch.num_paths()), n_span_(ch.n_span()) {
    table_.assign(static_cast<std::size_t>(2 * n_span_ + 1) * static_cast<std::size_t>(num_paths_), -1);
    // Delays are strictly increasing, so for a given source path and
    // delay difference at most one partner path exists.
    const std::vector<int>& delays = ch.delays();
    for (int source = 0; source < num_paths_; ++source) {
        for (int l = 0; l < num_paths_; ++l) {
            const int diff = delays[static_cast<std::size_t>(source)] - delays[static_cast<std::size_t>(l)];
            table_[static_cast<std::size_t>(diff + n_span_) * static_cast<std::size_t>(num_paths_) +
                   static_cast<std::size_t>(source)] = l;
        }
    }
}

int EffectiveChannelMap::interfered_path(int diff, int source) const {
    if (diff < -n_span_ || diff > n_span_ || source < 0 || source >= num_paths_) {
        throw DomainError("effective channel map: index out of range");
    }
    return table_[static_cast<std::size_t>(diff + n_span_) * static_cast<std::size_t>(num_paths_) +
                  static_cast<std::size_t>(source)];
}

CVec EffectiveChannelMap::g_vector(const ChannelRealization& ch, int diff, int source) const {
    const int l = interfered_path(diff, source);
    if (l < 0) {
        return CVec::Zero(ch.num_antennas());
    }
    return ch.path_vector(l);
}

LinkGains analytic_link_gains(const ChannelRealization& ch, const EffectiveChannelMap& map,
                              const CMat& path_precoder) {
    const int num_paths = ch.num_paths();
    if (path_precoder.cols() != num_paths || path_precoder.rows() != ch.num_antennas()) {
        throw LengthError("analytic_link_gains: precoder shape mismatch");
    }

    // Pairwise couplings b(l, l') = h_l^H f_l', computed as explicit dot
    // products so aggregation order is fixed.
    CMat couplings(num_paths, num_paths);
    for (int l = 0; l < num_paths; ++l) {
        for (int src = 0; src < num_paths; ++src) {
            couplings(l, src) = ch.path_matrix().col(l).dot(path_precoder.col(src));
        }
    }

    LinkGains gains;
    gains.gain = Complex(0.0, 0.0);
    for (int l = 0; l < num_paths; ++l) {
        gains.gain += couplings(l, l);
    }
    gains.signal_power = std::norm(gains.gain);

    gains.isi_power = 0.0;
    for (int diff = -map.n_span(); diff <= map.n_span(); ++diff) {
        if (diff == 0) {
            continue;
        }
        Complex tap(0.0, 0.0);
        for (int src = 0; src < num_paths; ++src) {
            const int l = map.interfered_path(diff, src);
            if (l >= 0) {
                tap += couplings(l, src);
            }
        }
        gains.isi_power += std::norm(tap);
    }
    return gains;
}

double analytic_sinr(const ChannelRealization& ch, const EffectiveChannelMap& map,
                     const CMat& path_precoder, double noise_var) {
    if (noise_var < 0.0) {
        throw DomainError("analytic_sinr: negative noise variance");
    }
    const LinkGains gains = analytic_link_gains(ch, map, path_precoder);
    const double denom = gains.isi_power + noise_var;
    if (denom == 0.0) {
        return gains.signal_power == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return gains.signal_power / denom;
}

double analytic_sinr(const ChannelRealization& ch, const EffectiveChannelMap& map,
                     const DamDigitalPrecoder& p, double noise_var) {
    return analytic_sinr(ch, map, p.columns, noise_var);
}

double analytic_sinr(const ChannelRealization& ch, const EffectiveChannelMap& map,
                     const HybridPrecoder& p, double noise_var) {
    return analytic_sinr(ch, map, p.effective(), noise_var);
}

SimulationResult simulate_link(const ChannelRealization& ch, const DelayPlan& plan,
                               const CMat& path_precoder, const CVec& symbols,
                               double noise_var, std::uint64_t seed) {
    const Eigen::Index s = symbols.size();
    if (s < plan.n_span + 1) {
        throw LengthError("simulate_link: symbol block shorter than the channel span");
    }
    if (noise_var < 0.0) {
        throw DomainError("simulate_link: negative noise variance");
    }

    // Noise-free pass, then the desired tap alone; their difference is
    // the inter-symbol interference exactly.
    const CMat x = synthesize_tx(plan, path_precoder, symbols);
    const CVec clean = convolve(ch, x);

    Complex gain(0.0, 0.0);
    for (int l = 0; l < ch.num_paths(); ++l) {
        gain += ch.path_matrix().col(l).dot(path_precoder.col(l));
    }

    Rng rng(seed);
    CVec noise = CVec::Zero(s);
    if (noise_var > 0.0) {
        for (Eigen::Index m = 0; m < s; ++m) {
            noise(m) = rng.complex_normal(noise_var);
        }
    }

    SimulationResult result;
    result.received = CVec(s);
    for (Eigen::Index m = 0; m < s; ++m) {
        result.received(m) = clean(m + plan.n_max) + noise(m);
    }

    // Steady-state window: drop n_span symbols on each side where the
    // block edges truncate the interference pattern.
    Eigen::Index lo = plan.n_span;
    Eigen::Index hi = s - plan.n_span;
    if (lo >= hi) {
        lo = 0;
        hi = s;
    }
    double desired_power = 0.0;
    double isi_power = 0.0;
    double noise_power = 0.0;
    for (Eigen::Index m = lo; m < hi; ++m) {
        const Complex desired = gain * symbols(m);
        const Complex isi = clean(m + plan.n_max) - desired;
        desired_power += std::norm(desired);
        isi_power += std::norm(isi);
        noise_power += std::norm(noise(m));
    }
    const double count = static_cast<double>(hi - lo);
    result.desired_power = desired_power / count;
    result.isi_power = isi_power / count;
    result.noise_power = noise_power / count;
    const double denom = result.isi_power + result.noise_power;
    result.sinr_empirical = denom == 0.0 ? std::numeric_limits<double>::infinity()
                                         : result.desired_power / denom;
    return result;
}

double dam_guard_overhead(std::int64_t coherence_samples, int max_delay_taps) {
    if (coherence_samples <= 0 || max_delay_taps < 0) {
        throw DomainError("dam_guard_overhead: invalid sample counts");
    }
    const double overhead = 2.0 * static_cast<double>(max_delay_taps) /
                            static_cast<double>(coherence_samples);
    if (overhead >= 1.0) {
        throw DomainError("dam_guard_overhead: guards exceed the coherence block");
    }
    return overhead;
}

double spectral_efficiency_dam(double sinr, std::int64_t coherence_samples,
                               int max_delay_taps) {
    if (sinr < 0.0) {
        throw DomainError("spectral_efficiency_dam: negative SINR");
    }
    const double overhead = dam_guard_overhead(coherence_samples, max_delay_taps);
    return (1.0 - overhead) * std::log2(1.0 + sinr);
}

}  // namespace damlink
