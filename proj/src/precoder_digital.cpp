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

#include "damlink/precoder_digital.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "damlink/errors.hpp"

namespace damlink {

namespace {

constexpr char kDamDigitalSchema[] = "damlink.precoder.dam_digital.v1";
constexpr char kOfdmDigitalSchema[] = "damlink.precoder.ofdm_digital.v1";

nlohmann::json matrix_to_json(const CMat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat matrix_from_json(const nlohmann::json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) {
        return CMat(0, 0);
    }
    const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError("matrix json: ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& entry = row.at(static_cast<std::size_t>(c));
            m(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return m;
}

}  // namespace

DamDigitalPrecoder dam_isi_zf(const ChannelRealization& ch, double power) {
    if (!(power > 0.0)) {
        throw DomainError("dam_isi_zf: power must be positive");
    }
    const int m = ch.num_antennas();
    const int num_paths = ch.num_paths();
    if (m < num_paths) {
        throw RankDeficientError("dam_isi_zf: fewer antennas than paths, zero forcing infeasible");
    }

    const CMat& h = ch.path_matrix();
    {
        Eigen::ColPivHouseholderQR<CMat> qr(h);
        qr.setThreshold(kRankTolerance);
        if (qr.rank() < num_paths) {
            throw RankDeficientError("dam_isi_zf: path vectors are linearly dependent");
        }
    }

    // Project each path vector away from the span of all others; the
    // projected directions zero every cross-path tap by construction.
    CMat projected(m, num_paths);
    double gain_sum = 0.0;
    for (int l = 0; l < num_paths; ++l) {
        CMat others(m, num_paths - 1);
        int c = 0;
        for (int k = 0; k < num_paths; ++k) {
            if (k != l) {
                others.col(c++) = h.col(k);
            }
        }
        const CMat q = projection_orthogonal(others);
        projected.col(l) = q * h.col(l);
        gain_sum += projected.col(l).squaredNorm();
    }
    if (!(gain_sum > 0.0)) {
        throw RankDeficientError("dam_isi_zf: projected path gains vanish");
    }

    DamDigitalPrecoder out;
    out.columns = std::sqrt(power / gain_sum) * projected;
    out.total_power = power;
    out.zf_gain_sum = gain_sum;
    return out;
}

Waterfill waterfill_power_allocation(const std::vector<double>& gain_sq, double power,
                                     double noise_var) {
    if (!(power > 0.0) || !(noise_var > 0.0)) {
        throw DomainError("waterfill: power and noise variance must be positive");
    }
    const std::size_t k_bins = gain_sq.size();
    if (k_bins == 0) {
        throw DomainError("waterfill: no subchannels");
    }
    const double k_scale = static_cast<double>(k_bins);

    // Per-bin cost floor: power on bin k becomes useful above
    // a_k = noise_var / (K g_k).
    std::vector<double> floors(k_bins, std::numeric_limits<double>::infinity());
    double max_floor = 0.0;
    bool any_active = false;
    for (std::size_t k = 0; k < k_bins; ++k) {
        if (gain_sq[k] > 0.0) {
            floors[k] = noise_var / (k_scale * gain_sq[k]);
            max_floor = std::max(max_floor, floors[k]);
            any_active = true;
        }
    }
    if (!any_active) {
        throw DegenerateChannelError("waterfill: every subchannel gain is zero");
    }

    const auto allocated = [&](double level) {
        double total = 0.0;
        for (std::size_t k = 0; k < k_bins; ++k) {
            if (gain_sq[k] > 0.0 && level > floors[k]) {
                total += level - floors[k];
            }
        }
        return total;
    };

    // The optimal water level lies in [0, power + max_floor]: at the upper
    // end at least the best bin contributes power + max_floor - min_floor
    // >= power.
    double lo = 0.0;
    double hi = power + max_floor;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (allocated(mid) < power) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double level = 0.5 * (lo + hi);

    Waterfill out;
    out.water_level = level;
    out.powers.assign(k_bins, 0.0);
    for (std::size_t k = 0; k < k_bins; ++k) {
        if (gain_sq[k] > 0.0 && level > floors[k]) {
            out.powers[k] = level - floors[k];
        }
    }
    return out;
}

OfdmDigitalPrecoder ofdm_mrt_waterfill(const ChannelRealization& ch, int k_bins, double power,
                                       double noise_var) {
    if (!(power > 0.0) || !(noise_var > 0.0)) {
        throw DomainError("ofdm_mrt_waterfill: power and noise variance must be positive");
    }
    const CMat freq = frequency_response(ch, k_bins);

    std::vector<double> gain_sq(static_cast<std::size_t>(k_bins));
    for (int k = 0; k < k_bins; ++k) {
        gain_sq[static_cast<std::size_t>(k)] = freq.col(k).squaredNorm();
    }
    Waterfill wf = waterfill_power_allocation(gain_sq, power, noise_var);

    OfdmDigitalPrecoder out;
    out.columns = CMat::Zero(ch.num_antennas(), k_bins);
    for (int k = 0; k < k_bins; ++k) {
        const double p_k = wf.powers[static_cast<std::size_t>(k)];
        if (p_k > 0.0) {
            // Matched direction scaled to carry exactly p_k.
            out.columns.col(k) =
                std::sqrt(p_k / gain_sq[static_cast<std::size_t>(k)]) * freq.col(k);
        }
    }
    out.powers = std::move(wf.powers);
    out.water_level = wf.water_level;
    out.total_power = power;
    return out;
}

nlohmann::json to_json(const DamDigitalPrecoder& p) {
    nlohmann::json j;
    j["schema"] = kDamDigitalSchema;
    j["columns"] = matrix_to_json(p.columns);
    j["total_power"] = p.total_power;
    j["zf_gain_sum"] = p.zf_gain_sum;
    return j;
}

nlohmann::json to_json(const OfdmDigitalPrecoder& p) {
    nlohmann::json j;
    j["schema"] = kOfdmDigitalSchema;
    j["columns"] = matrix_to_json(p.columns);
    j["powers"] = p.powers;
    j["water_level"] = p.water_level;
    j["total_power"] = p.total_power;
    return j;
}

DamDigitalPrecoder dam_digital_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kDamDigitalSchema) {
            throw ConfigError("precoder json: unknown schema tag");
        }
        DamDigitalPrecoder p;
        p.columns = matrix_from_json(j.at("columns"));
        p.total_power = j.at("total_power").get<double>();
        p.zf_gain_sum = j.at("zf_gain_sum").get<double>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("precoder json: ") + e.what());
    }
}

OfdmDigitalPrecoder ofdm_digital_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kOfdmDigitalSchema) {
            throw ConfigError("precoder json: unknown schema tag");
        }
        OfdmDigitalPrecoder p;
        p.columns = matrix_from_json(j.at("columns"));
        p.powers = j.at("powers").get<std::vector<double>>();
        p.water_level = j.at("water_level").get<double>();
        p.total_power = j.at("total_power").get<double>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("precoder json: ") + e.what());
    }
}

}  // namespace damlink
