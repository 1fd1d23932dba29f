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

#include "gmimo/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gmimo/errors.hpp"

namespace gmimo {

GramInverse::GramInverse(Eigen::Index num_elements, double rank_tol)
    : channels_(num_elements, 0), rank_tol_(rank_tol) {}

void GramInverse::reserve(Eigen::Index capacity) {
    if (capacity <= inverse_.cols()) return;
    const Eigen::Index n = active();
    channels_.conservativeResize(Eigen::NoChange, capacity);
    CMatrix grown(capacity, capacity);
    grown.topLeftCorner(n, n) = inverse_.topLeftCorner(n, n);
    inverse_ = std::move(grown);
    previous_.resize(capacity, capacity);
    xi_.resize(capacity);
    g_xi_.resize(capacity);
}

GramInverse::Update GramInverse::update(const Eigen::Ref<const CVector>& h, int user_id) {
    if (channels_.rows() == 0 && channels_.cols() == 0) channels_.resize(h.size(), 0);
    if (h.size() != channels_.rows()) throw std::invalid_argument("GramInverse::update: channel length mismatch");

    const Eigen::Index n = active();
    if (n + 1 > inverse_.cols()) reserve(std::max<Eigen::Index>(8, 2 * inverse_.cols()));
    const double energy = h.squaredNorm();

    // xi = H h with rows of H being h_i^H, i.e. xi_i = h_i^H h.
    auto xi = xi_.head(n);
    auto g_xi = g_xi_.head(n);
    xi.noalias() = channels_.leftCols(n).adjoint() * h;
    g_xi.noalias() = inverse_.topLeftCorner(n, n) * xi;
    last_schur_ = energy - xi.dot(g_xi).real();

    if (!(energy > 0.0) || !(last_schur_ > rank_tol_ * energy)) return Update::rejected;

    previous_.topLeftCorner(n, n) = inverse_.topLeftCorner(n, n);
    const double upsilon = 1.0 / last_schur_;
    inverse_.topLeftCorner(n, n).noalias() += upsilon * g_xi * g_xi.adjoint();
    inverse_.block(0, n, n, 1) = -upsilon * g_xi;
    inverse_.block(n, 0, 1, n) = -upsilon * g_xi.adjoint();
    inverse_(n, n) = upsilon;

    channels_.col(n) = h;
    ids_.push_back(user_id);
    has_snapshot_ = true;
    return Update::accepted;
}

void GramInverse::rollback() {
    if (!has_snapshot_) throw std::logic_error("GramInverse::rollback: no snapshot to restore");
    ids_.pop_back();
    const Eigen::Index n = active();
    inverse_.topLeftCorner(n, n) = previous_.topLeftCorner(n, n);
    has_snapshot_ = false;
}

CMatrix zf_precoders(const GramInverse& state) {
    if (state.empty()) throw NumericalError("zf_precoders: no users selected");
    CMatrix p = state.channels() * state.inverse();
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
        const double norm = p.col(k).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("zf_precoders: rank-deficient selection");
        p.col(k) /= norm;
    }
    return p;
}

std::vector<double> zf_effective_gains(const GramInverse& state, double noise_power) {
    std::vector<double> gains(state.size());
    for (std::size_t k = 0; k < gains.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        gains[k] = 1.0 / (noise_power * state.inverse()(i, i).real());
    }
    return gains;
}

double gamma_metric(const Eigen::Ref<const CVector>& h, const Eigen::Ref<const CMatrix>& active,
                    GammaVariant variant) {
    const double energy = h.squaredNorm();
    const double projected = active.cols() == 0 ? energy : energy - (active.adjoint() * h).squaredNorm();
    if (variant == GammaVariant::as_written) {
        if (!(projected > 0.0)) return std::numeric_limits<double>::infinity();
        return energy / projected;
    }
    if (!(energy > 0.0)) return 0.0;
    return std::clamp(projected / energy, 0.0, 1.0);
}

WaterfillingResult waterfilling(std::span<const double> gains, double p_tx) {
    if (gains.empty()) throw std::invalid_argument("waterfilling: no gains");
    if (!(p_tx >= 0.0)) throw std::invalid_argument("waterfilling: negative power budget");
    for (const double g : gains) {
        if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("waterfilling: gains must be finite and >= 0");
    }

    // Strongest users first; ties keep input order so the result is
    // permutation-equivariant.
    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });

    WaterfillingResult out;
    out.powers.assign(gains.size(), 0.0);
    if (gains[order.front()] <= 0.0) return out;

    // Grow the active set while the next user's floor 1/g sits below the level.
    double inv_sum = 1.0 / gains[order[0]];
    std::size_t active = 1;
    double level = p_tx + inv_sum;
    while (active < order.size() && gains[order[active]] > 0.0) {
        const double inv_next = 1.0 / gains[order[active]];
        const double candidate = (p_tx + inv_sum + inv_next) / static_cast<double>(active + 1);
        if (!(candidate > inv_next)) break;
        inv_sum += inv_next;
        ++active;
        level = candidate;
    }
    for (std::size_t i = 0; i < active; ++i) {
        out.powers[order[i]] = std::max(0.0, level - 1.0 / gains[order[i]]);
    }
    out.water_level = level;
    return out;
}

SumSe sum_se(const Eigen::Ref<const CMatrix>& channels, const Eigen::Ref<const CMatrix>& precoders,
             std::span<const double> powers, double noise_power) {
    const auto n = channels.cols();
    if (precoders.cols() != n || static_cast<Eigen::Index>(powers.size()) != n) {
        throw std::invalid_argument("sum_se: channels, precoders and powers disagree in size");
    }
    // coupling(k, i) = h_k^H p_i
    const CMatrix coupling = channels.adjoint() * precoders;
    SumSe out;
    out.rates.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        double interference = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i != k) interference += powers[static_cast<std::size_t>(i)] * std::norm(coupling(k, i));
        }
        const double signal = powers[static_cast<std::size_t>(k)] * std::norm(coupling(k, k));
        const double rate = std::log2(1.0 + signal / (interference + noise_power));
        out.rates[static_cast<std::size_t>(k)] = rate;
        out.total += rate;
    }
    return out;
}

}  // namespace gmimo
