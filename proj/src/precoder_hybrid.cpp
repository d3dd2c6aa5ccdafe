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

#include "damlink/precoder_hybrid.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "damlink/errors.hpp"

namespace damlink {

namespace {

constexpr char kHybridSchema[] = "damlink.precoder.hybrid.v1";

}  // namespace

SteeringDictionary build_dictionary(const ChannelRealization& ch,
                                    const ArrayGeometry& geometry) {
    SteeringDictionary dict;
    int total = 0;
    for (const auto& cluster : ch.subpaths()) {
        total += static_cast<int>(cluster.size());
    }
    dict.atoms = CMat(geometry.num_antennas, total);
    dict.tags.reserve(static_cast<std::size_t>(total));
    int col = 0;
    for (int l = 0; l < ch.num_paths(); ++l) {
        const auto& cluster = ch.subpaths()[static_cast<std::size_t>(l)];
        for (int i = 0; i < static_cast<int>(cluster.size()); ++i) {
            dict.atoms.col(col) = array_response(geometry, cluster[static_cast<std::size_t>(i)].theta_rad);
            dict.tags.push_back({l, i, cluster[static_cast<std::size_t>(i)].theta_rad});
            ++col;
        }
    }
    return dict;
}

HybridPrecoder omp_factorize(const CMat& target, const SteeringDictionary& dict,
                             int num_rf_chains, double power) {
    if (num_rf_chains < 1) {
        throw DomainError("omp_factorize: need at least one RF chain");
    }
    if (!(power > 0.0)) {
        throw DomainError("omp_factorize: power must be positive");
    }
    if (dict.num_atoms() < num_rf_chains) {
        throw DictionaryTooSmallError("omp_factorize: fewer atoms than RF chains");
    }
    if (dict.atoms.rows() != target.rows()) {
        throw LengthError("omp_factorize: dictionary and target row counts differ");
    }

    const int num_atoms = dict.num_atoms();
    CMat residual = target;

    std::vector<bool> selected(static_cast<std::size_t>(num_atoms), false);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(num_rf_chains));
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(num_rf_chains));
    CMat rf(target.rows(), num_rf_chains);
    CMat baseband;

    for (int step = 0; step < num_rf_chains; ++step) {
        // Total correlation energy of each remaining atom against the
        // residual; strict comparison keeps the lowest index on ties.
        const CMat corr = dict.atoms.adjoint() * residual;
        int best = -1;
        double best_energy = -1.0;
        for (int atom = 0; atom < num_atoms; ++atom) {
            if (selected[static_cast<std::size_t>(atom)]) {
                continue;
            }
            const double energy = corr.row(atom).squaredNorm();
            if (energy > best_energy) {
                best_energy = energy;
                best = atom;
            }
        }
        selected[static_cast<std::size_t>(best)] = true;
        order.push_back(best);
        rf.col(step) = dict.atoms.col(best);

        const auto active = rf.leftCols(step + 1);
        baseband = lsq_solve(active, target);
        residual = target - active * baseband;
        const double norm = residual.norm();
        history.push_back(norm);
        if (norm > 0.0) {
            residual /= norm;
        } else {
            residual.setZero();
        }
    }

    HybridPrecoder out;
    out.rf = std::move(rf);
    out.selected_atoms = std::move(order);
    out.residual = history.back();
    out.residual_history = std::move(history);

    // Rescale the baseband stage so the cascade radiates exactly the
    // power budget.
    const double cascade_norm_sq = (out.rf * baseband).squaredNorm();
    if (!(cascade_norm_sq > 0.0)) {
        throw DegenerateChannelError("omp_factorize: factorization carries no energy");
    }
    out.baseband = std::sqrt(power / cascade_norm_sq) * baseband;
    out.total_power = power;
    return out;
}

HybridPrecoder dam_hybrid(const ChannelRealization& ch, double power, int num_rf_chains) {
    const DamDigitalPrecoder digital = dam_isi_zf(ch, power);
    const SteeringDictionary dict = build_dictionary(ch, ch.geometry());
    return omp_factorize(digital.columns, dict, num_rf_chains, power);
}

HybridPrecoder ofdm_hybrid_from(const OfdmDigitalPrecoder& digital,
                                const ChannelRealization& ch, int num_rf_chains) {
    const SteeringDictionary dict = build_dictionary(ch, ch.geometry());
    return omp_factorize(digital.columns, dict, num_rf_chains, digital.total_power);
}

HybridPrecoder ofdm_hybrid(const ChannelRealization& ch, int k_bins, double power,
                           double noise_var, int num_rf_chains) {
    const OfdmDigitalPrecoder digital = ofdm_mrt_waterfill(ch, k_bins, power, noise_var);
    return ofdm_hybrid_from(digital, ch, num_rf_chains);
}

nlohmann::json to_json(const HybridPrecoder& p) {
    nlohmann::json j;
    j["schema"] = kHybridSchema;
    // The analog stage is unit-modulus by construction, so phases are a
    // lossless representation.
    nlohmann::json phases = nlohmann::json::array();
    for (Eigen::Index r = 0; r < p.rf.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < p.rf.cols(); ++c) {
            row.push_back(std::arg(p.rf(r, c)));
        }
        phases.push_back(std::move(row));
    }
    j["rf_phases"] = phases;
    nlohmann::json bb = nlohmann::json::array();
    for (Eigen::Index r = 0; r < p.baseband.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < p.baseband.cols(); ++c) {
            row.push_back({p.baseband(r, c).real(), p.baseband(r, c).imag()});
        }
        bb.push_back(std::move(row));
    }
    j["baseband"] = bb;
    j["selected_atoms"] = p.selected_atoms;
    j["residual"] = p.residual;
    j["residual_history"] = p.residual_history;
    j["total_power"] = p.total_power;
    return j;
}

HybridPrecoder hybrid_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kHybridSchema) {
            throw ConfigError("precoder json: unknown schema tag");
        }
        HybridPrecoder p;
        const auto& phases = j.at("rf_phases");
        const Eigen::Index rows = static_cast<Eigen::Index>(phases.size());
        const Eigen::Index cols =
            rows == 0 ? 0 : static_cast<Eigen::Index>(phases.at(0).size());
        p.rf = CMat(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                p.rf(r, c) = std::polar(
                    1.0, phases.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>());
            }
        }
        const auto& bb = j.at("baseband");
        const Eigen::Index brows = static_cast<Eigen::Index>(bb.size());
        const Eigen::Index bcols =
            brows == 0 ? 0 : static_cast<Eigen::Index>(bb.at(0).size());
        p.baseband = CMat(brows, bcols);
        for (Eigen::Index r = 0; r < brows; ++r) {
            for (Eigen::Index c = 0; c < bcols; ++c) {
                const auto& entry = bb.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
                p.baseband(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
            }
        }
        p.selected_atoms = j.at("selected_atoms").get<std::vector<int>>();
        p.residual = j.at("residual").get<double>();
        p.residual_history = j.at("residual_history").get<std::vector<double>>();
        p.total_power = j.at("total_power").get<double>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("precoder json: ") + e.what());
    }
}

}  // namespace damlink
