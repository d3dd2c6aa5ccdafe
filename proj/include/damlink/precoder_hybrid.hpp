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
#include "damlink/precoder_digital.hpp"

namespace damlink {

// Candidate analog beams: the steering vectors of every subpath in a
// channel realization, one atom per (path, subpath) pair, ordered by
// path index then subpath index.
struct SteeringDictionary {
    struct Tag {
        int path = 0;
        int subpath = 0;
        double theta_rad = 0.0;
    };

    CMat atoms;             // num_antennas x num_atoms, unit-modulus entries
    std::vector<Tag> tags;  // provenance of each atom, same order

    int num_atoms() const { return static_cast<int>(atoms.cols()); }
};

SteeringDictionary build_dictionary(const ChannelRealization& ch,
                                    const ArrayGeometry& geometry);

// Two-stage factorization F ~= F_rf * F_bb of a target precoder, with
// F_rf drawn from a fixed set of unit-modulus columns.
struct HybridPrecoder {
    CMat rf;                          // num_antennas x num_rf_chains
    CMat baseband;                    // num_rf_chains x target columns
    std::vector<int> selected_atoms;  // dictionary indices, selection order
    // Frobenius approximation error |F - F_rf F_bb|_F measured against the
    // unscaled least-squares fit, before the final power renormalization.
    double residual = 0.0;
    // The same error after each greedy iteration; non-increasing because
    // the fits are nested.
    std::vector<double> residual_history;
    double total_power = 0.0;

    CMat effective() const { return rf * baseband; }
};

// Orthogonal matching pursuit over the dictionary: per iteration, selects
// the not-yet-chosen atom with the largest total correlation energy
// against the current residual (lowest index on ties), refits the
// baseband matrix by least squares against the full target, and
// re-normalizes the residual. The returned factorization is rescaled so
// |F_rf F_bb|_F^2 == power. Throws DictionaryTooSmallError when the
// dictionary has fewer atoms than num_rf_chains, DomainError for a
// non-positive power or chain count.
HybridPrecoder omp_factorize(const CMat& target, const SteeringDictionary& dict,
                             int num_rf_chains, double power);

// Hybrid approximations of the digital designs, using the realization's
// own subpath steering vectors as the candidate beam set.
HybridPrecoder dam_hybrid(const ChannelRealization& ch, double power,
                          int num_rf_chains);
HybridPrecoder ofdm_hybrid(const ChannelRealization& ch, int k_bins,
                           double power, double noise_var, int num_rf_chains);

// Variant that factorizes an already-computed digital OFDM precoder, so
// callers needing both keep a single water-filling solution.
HybridPrecoder ofdm_hybrid_from(const OfdmDigitalPrecoder& digital,
                                const ChannelRealization& ch,
                                int num_rf_chains);

nlohmann::json to_json(const HybridPrecoder& p);
HybridPrecoder hybrid_from_json(const nlohmann::json& j);

}  // namespace damlink
