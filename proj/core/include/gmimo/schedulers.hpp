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

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gmimo/channel.hpp"
#include "gmimo/geometry.hpp"
#include "gmimo/precoding.hpp"

namespace gmimo {

enum class StoppingRule {
    sum_se_decrease,  // undo the admission that lowered the sum-SE, then stop
    exhaustion,       // keep admitting until no candidate is left
};

struct SchedulerConfig {
    double mu = 0.5;       // admission threshold on gamma_metric
    double l_init = 10.0;  // RSS initial half-width, metres
    double l_step = 1.0;   // RSS growth per pass, metres
    GammaVariant gamma_variant = GammaVariant::residual_fraction;
    StoppingRule stopping = StoppingRule::sum_se_decrease;
    std::optional<double> sus_alpha;  // SUS pruning threshold; disabled when unset

    void validate() const;
};

struct SchedulerOutcome {
    SelectionResult result;
    double runtime_s = 0.0;  // selection + precoding + power allocation
    std::size_t candidate_evaluations = 0;
    std::vector<int> evaluation_trace;  // candidates in the order they were examined
};

enum class SchedulerKind { rss, fls, sus, greedy, dbs };

inline constexpr SchedulerKind kAllSchedulers[] = {SchedulerKind::rss, SchedulerKind::fls, SchedulerKind::sus,
                                                   SchedulerKind::greedy, SchedulerKind::dbs};

std::string_view to_string(SchedulerKind kind) noexcept;
std::optional<SchedulerKind> scheduler_from_string(std::string_view name) noexcept;

// All schedulers take the candidate positions, their channels as columns
// (NM x K), the total transmit power and the noise power. Ties on the sort key
// (x for RSS/FLS, r for DBS, residual energy for SUS) go to the lowest index.

// Rectangular search: candidates with x < l and |y| < l are visited in
// ascending x; the half-width l grows by l_step whenever the rectangle is spent.
SchedulerOutcome rss(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power);

// Front line: all candidates visited in ascending x.
SchedulerOutcome fls(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power);

// Semi-orthogonal user selection: each step admits the candidate with the
// largest channel component orthogonal to the selected span.
SchedulerOutcome sus(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power);

// One pass over a random permutation; a user is kept only if the sum-SE
// strictly increases.
SchedulerOutcome greedy(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                        Rng& rng, double p_tx, double noise_power);

// Distance-based: candidates visited in ascending r.
SchedulerOutcome dbs(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power);

// Dispatch by kind; `seed` only feeds the greedy permutation.
SchedulerOutcome run_scheduler(SchedulerKind kind, std::span<const UserPosition> users, const CMatrix& channels,
                               const SchedulerConfig& cfg, std::uint64_t seed, double p_tx, double noise_power);

}  // namespace gmimo
