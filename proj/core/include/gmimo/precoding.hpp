// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <span>
#include <vector>

#include "gmimo/channel.hpp"

namespace gmimo {

// Relative Schur-complement floor: a channel whose component orthogonal to the
// selected set carries less than this fraction of its energy is rejected.
inline constexpr double kRankTolerance = 1e-10;

// Inverse of the Gram matrix of the selected channels, G = (H H^H)^{-1} with
// rows of H equal to h_i^H, grown one user at a time through the Schur
// complement of the new diagonal entry. Each update costs O(|S| NM) for the
// cross-correlations plus O(|S|^2) for the rank-one correction; no
// factorisation is ever recomputed.
//
// Exactly one update can be undone (rollback), which is what the sum-SE
// stopping rule needs.
class GramInverse {
public:
    enum class Update { accepted, rejected };

    GramInverse() = default;
    explicit GramInverse(Eigen::Index num_elements, double rank_tol = kRankTolerance);

    Update update(const Eigen::Ref<const CVector>& h, int user_id);

    // Restores the state before the most recent accepted update. Throws
    // std::logic_error when no snapshot is held.
    void rollback();

    bool has_snapshot() const noexcept { return has_snapshot_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    Eigen::Index num_elements() const noexcept { return channels_.rows(); }

    const std::vector<int>& user_ids() const noexcept { return ids_; }

    // Selected channels as columns h_i (NM x |S|).
    auto channels() const { return channels_.leftCols(active()); }
    // G, |S| x |S|.
    auto inverse() const { return inverse_.topLeftCorner(active(), active()); }

    // Schur complement ||h||^2 - xi^H G xi of the last update attempt.
    double last_schur_complement() const noexcept { return last_schur_; }

private:
    Eigen::Index active() const noexcept { return static_cast<Eigen::Index>(ids_.size()); }
    void reserve(Eigen::Index capacity);

    // Storage is sized to a capacity that doubles on demand, so an update
    // never allocates once the capacity covers the selection.
    CMatrix channels_;  // NM x capacity, first size() columns in use
    CMatrix inverse_;   // capacity x capacity, top-left |S| x |S| in use
    CMatrix previous_;  // capacity x capacity, copy taken before the last update
    CVector xi_;
    CVector g_xi_;
    std::vector<int> ids_;
    double rank_tol_ = kRankTolerance;
    double last_schur_ = 0.0;
    bool has_snapshot_ = false;
};

inline GramInverse gram_init(Eigen::Index num_elements) { return GramInverse(num_elements); }

// Unit-norm ZF precoders for every selected user (NM x |S|), column k being
// the normalised projection of h_k onto the orthogonal complement of the
// other selected channels: P = H G with H the selected channel columns.
// Throws NumericalError for an empty state or non-finite output.
CMatrix zf_precoders(const GramInverse& state);

// Effective ZF gains |h_k^H p_k|^2 / noise = 1 / (noise * G_kk).
std::vector<double> zf_effective_gains(const GramInverse& state, double noise_power);

enum class GammaVariant {
    residual_fraction,  // h^H (I - F F^H) h / ||h||^2, clamped to [0, 1]
    as_written,         // ||h||^2 / h^H (I - F F^H) h
};

// Admission metric for candidate h against the active tentative precoders
// (columns of `active`, unit norm). An empty set yields 1 in both variants.
// The as-written variant returns +infinity when the projected energy is <= 0.
double gamma_metric(const Eigen::Ref<const CVector>& h, const Eigen::Ref<const CMatrix>& active,
                    GammaVariant variant);

struct WaterfillingResult {
    std::vector<double> powers;
    double water_level = 0.0;
};

// Maximises sum log(1 + p_k g_k) subject to sum p_k = p_tx. Gains must be
// finite and non-negative; zero gains never receive power. Throws
// std::invalid_argument for empty input or invalid gains.
WaterfillingResult waterfilling(std::span<const double> gains, double p_tx);

struct SumSe {
    std::vector<double> rates;  // bits/s/Hz per user
    double total = 0.0;
};

// Per-user rates from the SINR of every selected user under the given
// precoders (columns, NM x |S|) and powers.
SumSe sum_se(const Eigen::Ref<const CMatrix>& channels, const Eigen::Ref<const CMatrix>& precoders,
             std::span<const double> powers, double noise_power);

// Served set with its precoders, powers and rates.
struct SelectionResult {
    std::vector<int> selected;
    CMatrix precoders;  // NM x |S|, unit-norm columns
    std::vector<double> powers;
    std::vector<double> rates;
    double sum_se = 0.0;
};

}  // namespace gmimo
