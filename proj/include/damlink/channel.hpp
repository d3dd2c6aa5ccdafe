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

#include <json.hpp>

#include "damlink/numerics.hpp"
#include "damlink/rng.hpp"

namespace damlink {

// Uniform linear transmit array, element m at position m * spacing.
struct ArrayGeometry {
    int num_antennas = 1;
    double spacing_over_wavelength = 0.5;
};

// Parameters of the random sparse multipath model. Paths are resolved at
// integer sample delays; each path is a cluster of plane-wave subpaths
// that share one delay tap.
struct ChannelConfig {
    ArrayGeometry geometry;
    int num_paths = 1;           // L, delay-resolvable paths
    int max_delay_taps = 0;      // largest admissible tap index
    int max_subpaths = 1;        // per-path subpath count upper bound
    double aod_lo_deg = -60.0;   // departure angle range, degrees
    double aod_hi_deg = 60.0;
    // Average total channel gain in dB. Per-path complex gains are drawn
    // i.i.d. CN(0, g/L) with g the linear value of this field, so the
    // expected sum of squared path-vector norms is g * num_antennas.
    double path_gain_db = 0.0;
    std::uint64_t seed = 0;
};

// One plane-wave component inside a path cluster.
struct Subpath {
    double theta_rad = 0.0;  // departure angle
    Complex nu;              // complex weight; per path, sum |nu|^2 == 1
};

// Immutable draw of the multipath channel. Path l has spatial response
//   h_l = alpha_l * sum_i nu_li * a(theta_li)
// at integer delay tap n_l, with delays strictly increasing across paths.
class ChannelRealization {
  public:
    // Assembles a realization from explicit parts. Delays must be strictly
    // increasing and non-negative; per-path subpath weights must satisfy
    // sum |nu|^2 == 1 to 1e-10. Throws ConfigError on violation.
    static ChannelRealization from_parts(const ArrayGeometry& geometry,
                                         std::vector<int> delays,
                                         std::vector<Complex> alphas,
                                         std::vector<std::vector<Subpath>> subpaths);

    int num_paths() const { return static_cast<int>(delays_.size()); }
    int num_antennas() const { return geometry_.num_antennas; }
    const ArrayGeometry& geometry() const { return geometry_; }

    const std::vector<int>& delays() const { return delays_; }
    const std::vector<Complex>& alphas() const { return alphas_; }
    const std::vector<std::vector<Subpath>>& subpaths() const { return subpaths_; }

    // Spatial path vectors stacked as columns, num_antennas x num_paths.
    const CMat& path_matrix() const { return h_; }
    CVec path_vector(int l) const { return h_.col(l); }

    int n_min() const { return delays_.front(); }
    int n_max() const { return delays_.back(); }
    // Largest delay difference between any two paths.
    int n_span() const { return delays_.back() - delays_.front(); }

    // Sum of squared path-vector norms.
    double total_gain() const;

  private:
    ChannelRealization() = default;

    ArrayGeometry geometry_;
    std::vector<int> delays_;
    std::vector<Complex> alphas_;
    std::vector<std::vector<Subpath>> subpaths_;
    CMat h_;
};

// Steering vector of the uniform linear array toward departure angle
// theta (radians): element m is exp(-j 2 pi spacing m sin(theta)).
CVec array_response(const ArrayGeometry& geometry, double theta_rad);

// Draws one channel realization from the model in cfg, deterministically
// in cfg.seed. Delay taps are a uniform without-replacement draw from
// {0, ..., max_delay_taps}; subpath counts are uniform on
// {1, ..., max_subpaths}; angles are uniform on the configured range;
// subpath power splits are uniform on the simplex.
ChannelRealization generate_channel(const ChannelConfig& cfg);

// Frequency response on K uniformly spaced bins,
//   h[k] = K^{-1/2} * sum_l h_l exp(-j 2 pi k n_l / K),
// returned as a num_antennas x K matrix. Requires K > n_max; throws
// DomainError otherwise. Columns satisfy the Parseval identity
// sum_k |h[k]|^2 == sum_l |h_l|^2.
CMat frequency_response(const ChannelRealization& ch, int k_bins);

// Tap-domain channel output for a transmit block x (num_antennas x N):
//   y[n] = sum_l h_l^H x[n - n_l],
// length N + n_max, zero-padded outside the block.
CVec convolve(const ChannelRealization& ch, const CMat& x);

// Adds circularly symmetric white Gaussian noise of the given variance to
// every entry, drawing from rng in index order.
void add_awgn(CVec& y, double noise_var, Rng& rng);

// JSON serialization of a realization, including the geometry, so that a
// stored draw can be reloaded and replayed exactly. channel_from_json
// validates the schema tag and all invariants; throws ConfigError on a
// malformed document.
nlohmann::json to_json(const ChannelRealization& ch);
ChannelRealization channel_from_json(const nlohmann::json& j);

}  // namespace damlink
