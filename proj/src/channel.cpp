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

#include "damlink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "damlink/errors.hpp"

namespace damlink {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr char kChannelSchema[] = "damlink.channel.v1";

void validate_geometry(const ArrayGeometry& geometry) {
    if (geometry.num_antennas < 1) {
        throw ConfigError("geometry: num_antennas must be >= 1");
    }
    if (!(geometry.spacing_over_wavelength > 0.0)) {
        throw ConfigError("geometry: spacing must be positive");
    }
}

}  // namespace

CVec array_response(const ArrayGeometry& geometry, double theta_rad) {
    validate_geometry(geometry);
    const int m = geometry.num_antennas;
    const double step = -2.0 * M_PI * geometry.spacing_over_wavelength * std::sin(theta_rad);
    CVec a(m);
    for (int i = 0; i < m; ++i) {
        a(i) = std::polar(1.0, step * static_cast<double>(i));
    }
    return a;
}

ChannelRealization ChannelRealization::from_parts(const ArrayGeometry& geometry,
                                                  std::vector<int> delays,
                                                  std::vector<Complex> alphas,
                                                  std::vector<std::vector<Subpath>> subpaths) {
    validate_geometry(geometry);
    const std::size_t num_paths = delays.size();
    if (num_paths == 0) {
        throw ConfigError("channel: at least one path required");
    }
    if (alphas.size() != num_paths || subpaths.size() != num_paths) {
        throw ConfigError("channel: per-path array sizes disagree");
    }
    if (delays.front() < 0) {
        throw ConfigError("channel: negative delay tap");
    }
    for (std::size_t l = 1; l < num_paths; ++l) {
        if (delays[l] <= delays[l - 1]) {
            throw ConfigError("channel: delays must be strictly increasing");
        }
    }
    for (std::size_t l = 0; l < num_paths; ++l) {
        if (subpaths[l].empty()) {
            throw ConfigError("channel: every path needs at least one subpath");
        }
        double weight = 0.0;
        for (const Subpath& sp : subpaths[l]) {
            weight += std::norm(sp.nu);
        }
        if (std::abs(weight - 1.0) > 1e-10) {
            throw ConfigError("channel: subpath weights of a path must sum to one");
        }
    }

    ChannelRealization ch;
    ch.geometry_ = geometry;
    ch.delays_ = std::move(delays);
    ch.alphas_ = std::move(alphas);
    ch.subpaths_ = std::move(subpaths);
    ch.h_ = CMat::Zero(geometry.num_antennas, static_cast<Eigen::Index>(num_paths));
    for (std::size_t l = 0; l < num_paths; ++l) {
        CVec cluster = CVec::Zero(geometry.num_antennas);
        for (const Subpath& sp : ch.subpaths_[l]) {
            cluster += sp.nu * array_response(geometry, sp.theta_rad);
        }
        ch.h_.col(static_cast<Eigen::Index>(l)) = ch.alphas_[l] * cluster;
    }
    return ch;
}

double ChannelRealization::total_gain() const { return h_.squaredNorm(); }

ChannelRealization generate_channel(const ChannelConfig& cfg) {
    validate_geometry(cfg.geometry);
    if (cfg.num_paths < 1) {
        throw ConfigError("generate_channel: num_paths must be >= 1");
    }
    if (cfg.max_delay_taps < 0) {
        throw ConfigError("generate_channel: max_delay_taps must be >= 0");
    }
    if (cfg.num_paths > cfg.max_delay_taps + 1) {
        throw ConfigError("generate_channel: more paths than distinct delay taps");
    }
    if (cfg.max_subpaths < 1) {
        throw ConfigError("generate_channel: max_subpaths must be >= 1");
    }
    if (!(cfg.aod_lo_deg <= cfg.aod_hi_deg) || cfg.aod_lo_deg <= -90.0 || cfg.aod_hi_deg >= 90.0) {
        throw ConfigError("generate_channel: departure angle range must lie inside (-90, 90)");
    }

    Rng rng(cfg.seed);

    // Uniform without-replacement draw of num_paths taps from
    // {0, ..., max_delay_taps} (Floyd's subset sampling).
    std::set<int> taps;
    for (int j = cfg.max_delay_taps + 1 - cfg.num_paths; j <= cfg.max_delay_taps; ++j) {
        const int t = static_cast<int>(rng.uniform_int(0, j));
        if (!taps.insert(t).second) {
            taps.insert(j);
        }
    }
    std::vector<int> delays(taps.begin(), taps.end());

    const double lo_rad = cfg.aod_lo_deg * kDegToRad;
    const double hi_rad = cfg.aod_hi_deg * kDegToRad;
    const double alpha_var = std::pow(10.0, cfg.path_gain_db / 10.0) / cfg.num_paths;

    std::vector<Complex> alphas(static_cast<std::size_t>(cfg.num_paths));
    std::vector<std::vector<Subpath>> subpaths(static_cast<std::size_t>(cfg.num_paths));
    for (int l = 0; l < cfg.num_paths; ++l) {
        const int mu = static_cast<int>(rng.uniform_int(1, cfg.max_subpaths));
        std::vector<Subpath> cluster(static_cast<std::size_t>(mu));
        std::vector<double> shares(static_cast<std::size_t>(mu));
        double share_sum = 0.0;
        for (int i = 0; i < mu; ++i) {
            cluster[static_cast<std::size_t>(i)].theta_rad = rng.uniform(lo_rad, hi_rad);
            const double phase = rng.uniform(0.0, 2.0 * M_PI);
            // Exponential spacings normalize to a uniform point on the
            // probability simplex.
            const double exp_draw = -std::log(1.0 - rng.uniform01());
            shares[static_cast<std::size_t>(i)] = exp_draw;
            share_sum += exp_draw;
            cluster[static_cast<std::size_t>(i)].nu = std::polar(1.0, phase);
        }
        for (int i = 0; i < mu; ++i) {
            cluster[static_cast<std::size_t>(i)].nu *=
                std::sqrt(shares[static_cast<std::size_t>(i)] / share_sum);
        }
        subpaths[static_cast<std::size_t>(l)] = std::move(cluster);
        alphas[static_cast<std::size_t>(l)] = rng.complex_normal(alpha_var);
    }

    return ChannelRealization::from_parts(cfg.geometry, std::move(delays), std::move(alphas),
                                          std::move(subpaths));
}

CMat frequency_response(const ChannelRealization& ch, int k_bins) {
    if (k_bins <= ch.n_max()) {
        throw DomainError("frequency_response: need more bins than the largest delay tap");
    }
    const int m = ch.num_antennas();
    const int num_paths = ch.num_paths();
    CMat freq = CMat::Zero(m, k_bins);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k_bins));
    for (int l = 0; l < num_paths; ++l) {
        const CVec h_l = ch.path_vector(l);
        const double step = -2.0 * M_PI * static_cast<double>(ch.delays()[l]) /
                            static_cast<double>(k_bins);
        for (int k = 0; k < k_bins; ++k) {
            freq.col(k) += (scale * std::polar(1.0, step * static_cast<double>(k))) * h_l;
        }
    }
    return freq;
}

CVec convolve(const ChannelRealization& ch, const CMat& x) {
    if (x.rows() != ch.num_antennas()) {
        throw LengthError("convolve: antenna count mismatch");
    }
    const Eigen::Index n_in = x.cols();
    const Eigen::Index n_out = n_in + ch.n_max();
    CVec y = CVec::Zero(n_out);
    for (int l = 0; l < ch.num_paths(); ++l) {
        const Eigen::RowVectorXcd projected = ch.path_vector(l).adjoint() * x;
        y.segment(ch.delays()[l], n_in) += projected.transpose();
    }
    return y;
}

void add_awgn(CVec& y, double noise_var, Rng& rng) {
    if (noise_var < 0.0) {
        throw DomainError("add_awgn: negative variance");
    }
    if (noise_var == 0.0) {
        return;
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y(i) += rng.complex_normal(noise_var);
    }
}

nlohmann::json to_json(const ChannelRealization& ch) {
    nlohmann::json j;
    j["schema"] = kChannelSchema;
    j["geometry"] = {{"num_antennas", ch.geometry().num_antennas},
                     {"spacing_over_wavelength", ch.geometry().spacing_over_wavelength}};
    j["delays"] = ch.delays();
    nlohmann::json paths = nlohmann::json::array();
    for (int l = 0; l < ch.num_paths(); ++l) {
        nlohmann::json path;
        path["alpha"] = {ch.alphas()[static_cast<std::size_t>(l)].real(),
                         ch.alphas()[static_cast<std::size_t>(l)].imag()};
        nlohmann::json cluster = nlohmann::json::array();
        for (const Subpath& sp : ch.subpaths()[static_cast<std::size_t>(l)]) {
            cluster.push_back({{"theta_rad", sp.theta_rad},
                               {"nu", {sp.nu.real(), sp.nu.imag()}}});
        }
        path["subpaths"] = cluster;
        paths.push_back(path);
    }
    j["paths"] = paths;
    return j;
}

ChannelRealization channel_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kChannelSchema) {
            throw ConfigError("channel json: unknown schema tag");
        }
        ArrayGeometry geometry;
        geometry.num_antennas = j.at("geometry").at("num_antennas").get<int>();
        geometry.spacing_over_wavelength =
            j.at("geometry").at("spacing_over_wavelength").get<double>();
        std::vector<int> delays = j.at("delays").get<std::vector<int>>();
        std::vector<Complex> alphas;
        std::vector<std::vector<Subpath>> subpaths;
        for (const auto& path : j.at("paths")) {
            const auto alpha = path.at("alpha");
            alphas.emplace_back(alpha.at(0).get<double>(), alpha.at(1).get<double>());
            std::vector<Subpath> cluster;
            for (const auto& sp : path.at("subpaths")) {
                Subpath s;
                s.theta_rad = sp.at("theta_rad").get<double>();
                s.nu = Complex(sp.at("nu").at(0).get<double>(), sp.at("nu").at(1).get<double>());
                cluster.push_back(s);
            }
            subpaths.push_back(std::move(cluster));
        }
        return ChannelRealization::from_parts(geometry, std::move(delays), std::move(alphas),
                                              std::move(subpaths));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("channel json: ") + e.what());
    }
}

}  // namespace damlink
