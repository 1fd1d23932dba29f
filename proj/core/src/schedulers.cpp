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

#include "gmimo/schedulers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "gmimo/errors.hpp"

namespace gmimo {

void SchedulerConfig::validate() const {
    if (!(l_init > 0.0)) throw ConfigError("scheduler.l_init", "must be positive");
    if (!(l_step > 0.0)) throw ConfigError("scheduler.l_step", "must be positive");
    if (gamma_variant == GammaVariant::residual_fraction) {
        if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("scheduler.mu", "must lie in (0, 1) for the residual-fraction metric");
    } else if (!(mu > 0.0)) {
        throw ConfigError("scheduler.mu", "must be positive");
    }
    if (sus_alpha && !(*sus_alpha > 0.0 && *sus_alpha <= 1.0)) {
        throw ConfigError("scheduler.sus_alpha", "must lie in (0, 1]");
    }
}

std::string_view to_string(SchedulerKind kind) noexcept {
    switch (kind) {
        case SchedulerKind::rss: return "rss";
        case SchedulerKind::fls: return "fls";
        case SchedulerKind::sus: return "sus";
        case SchedulerKind::greedy: return "greedy";
        case SchedulerKind::dbs: return "dbs";
    }
    return "unknown";
}

std::optional<SchedulerKind> scheduler_from_string(std::string_view name) noexcept {
    for (const auto kind : kAllSchedulers) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

namespace {

// State shared by every strategy: the incremental Gram inverse, the tentative
// ZF precoders used by the admission metric, and the best sum-SE seen so far.
class AdmissionSession {
public:
    enum class Step { admitted, rejected, stop };

    AdmissionSession(const CMatrix& channels, const SchedulerConfig& cfg, double p_tx, double noise_power)
        : channels_(channels), cfg_(cfg), p_tx_(p_tx), noise_(noise_power), gram_(channels.rows()),
          tentative_(channels.rows(), 0) {}

    void note_evaluation(int k) {
        ++evaluations_;
        trace_.push_back(k);
    }

    bool gamma_passes(int k) {
        note_evaluation(k);
        const auto n = static_cast<Eigen::Index>(gram_.size());
        const double gamma = gamma_metric(channels_.col(k), tentative_.leftCols(n), cfg_.gamma_variant);
        return gamma >= cfg_.mu;
    }

    // Energy of h_k orthogonal to the tentative precoders.
    double orthogonal_energy(int k) {
        note_evaluation(k);
        const auto n = static_cast<Eigen::Index>(gram_.size());
        const auto h = channels_.col(k);
        return h.squaredNorm() * gamma_metric(h, tentative_.leftCols(n), GammaVariant::residual_fraction);
    }

    Step admit(int k) {
        if (gram_.update(channels_.col(k), k) == GramInverse::Update::rejected) return Step::rejected;
        const double se = zf_sum_se();
        if (cfg_.stopping == StoppingRule::sum_se_decrease && se < best_se_) {
            gram_.rollback();
            return Step::stop;
        }
        best_se_ = std::max(best_se_, se);
        push_tentative();
        return Step::admitted;
    }

    // Keeps user k only if the sum-SE strictly increases.
    bool admit_if_improves(int k) {
        if (gram_.update(channels_.col(k), k) == GramInverse::Update::rejected) return false;
        const double se = zf_sum_se();
        if (se > best_se_) {
            best_se_ = se;
            push_tentative();
            return true;
        }
        gram_.rollback();
        return false;
    }

    SchedulerOutcome finish(std::chrono::steady_clock::time_point start) {
        SchedulerOutcome out;
        out.result = finalize();
        out.candidate_evaluations = evaluations_;
        out.evaluation_trace = std::move(trace_);
        out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return out;
    }

private:
    double zf_sum_se() const {
        const std::vector<double> gains = zf_effective_gains(gram_, noise_);
        const WaterfillingResult wf = waterfilling(gains, p_tx_);
        double total = 0.0;
        for (std::size_t i = 0; i < gains.size(); ++i) total += std::log2(1.0 + wf.powers[i] * gains[i]);
        return total;
    }

    // ZF direction of the newest user against the previously selected ones.
    void push_tentative() {
        const auto n = static_cast<Eigen::Index>(gram_.size());
        CVector f = gram_.channels() * gram_.inverse().col(n - 1);
        f.normalize();
        if (tentative_.cols() < n) {
            tentative_.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(8, 2 * tentative_.cols()));
        }
        tentative_.col(n - 1) = f;
    }

    SelectionResult finalize() const {
        SelectionResult res;
        res.selected = gram_.user_ids();
        if (gram_.empty()) {
            res.precoders = CMatrix(channels_.rows(), 0);
            return res;
        }
        res.precoders = zf_precoders(gram_);
        const CMatrix selected = gram_.channels();
        std::vector<double> gains(gram_.size());
        for (std::size_t k = 0; k < gains.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            gains[k] = std::norm(selected.col(i).dot(res.precoders.col(i))) / noise_;
        }
        res.powers = waterfilling(gains, p_tx_).powers;
        SumSe se = sum_se(selected, res.precoders, res.powers, noise_);
        res.rates = std::move(se.rates);
        res.sum_se = se.total;
        return res;
    }

    const CMatrix& channels_;
    const SchedulerConfig& cfg_;
    double p_tx_;
    double noise_;
    GramInverse gram_;
    CMatrix tentative_;
    double best_se_ = 0.0;
    std::size_t evaluations_ = 0;
    std::vector<int> trace_;
};

void check_inputs(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg) {
    cfg.validate();
    if (static_cast<Eigen::Index>(users.size()) != channels.cols()) {
        throw std::invalid_argument("scheduler: one channel column per user required");
    }
}

// Indices sorted by key, ties broken by the lower index.
template <typename Key>
std::vector<int> ordered_by(std::size_t count, Key&& key) {
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
    return order;
}

// Visits candidates in a fixed order, gamma-testing and admitting each. With
// the residual-fraction metric a rejection is final: the projected energy of a
// candidate can only shrink as the selected span grows. The as-written metric
// has no such monotonicity, so rejected users are revisited for as long as a
// pass admits somebody.
void ordered_admission(AdmissionSession& session, const std::vector<int>& order, const SchedulerConfig& cfg) {
    std::vector<char> open(*std::max_element(order.begin(), order.end()) + 1, 1);
    const bool retest = cfg.gamma_variant == GammaVariant::as_written;
    bool admitted_any = true;
    while (admitted_any) {
        admitted_any = false;
        for (const int k : order) {
            if (!open[k]) continue;
            if (!session.gamma_passes(k)) {
                if (!retest) open[k] = 0;
                continue;
            }
            switch (session.admit(k)) {
                case AdmissionSession::Step::admitted:
                    admitted_any = true;
                    open[k] = 0;
                    break;
                case AdmissionSession::Step::rejected:
                    open[k] = 0;
                    break;
                case AdmissionSession::Step::stop:
                    return;
            }
        }
        if (!retest) break;
    }
}

}  // namespace

SchedulerOutcome rss(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power) {
    const auto start = std::chrono::steady_clock::now();
    check_inputs(users, channels, cfg);
    AdmissionSession session(channels, cfg, p_tx, noise_power);

    const std::size_t count = users.size();
    std::vector<double> xs(count), ys(count);
    for (std::size_t i = 0; i < count; ++i) {
        xs[i] = users[i].x();
        ys[i] = users[i].y();
    }

    // pending == still in the candidate pool and worth (re)testing.
    std::vector<char> pending(count, 1);
    std::size_t pending_count = count;
    const bool retest = cfg.gamma_variant == GammaVariant::as_written;
    auto drop = [&](int k) {
        pending[static_cast<std::size_t>(k)] = 0;
        --pending_count;
    };

    double l = cfg.l_init;
    std::vector<int> region;
    bool stop = false;
    while (!stop && pending_count > 0) {
        region.clear();
        for (std::size_t i = 0; i < count; ++i) {
            if (pending[i] && xs[i] < l && std::abs(ys[i]) < l) region.push_back(static_cast<int>(i));
        }
        std::stable_sort(region.begin(), region.end(), [&](int a, int b) { return xs[a] < xs[b]; });
        const bool covers_all = region.size() == pending_count;

        bool admitted_any = false;
        for (const int k : region) {
            if (!session.gamma_passes(k)) {
                if (!retest) drop(k);
                continue;
            }
            const auto step = session.admit(k);
            if (step == AdmissionSession::Step::stop) {
                stop = true;
                break;
            }
            if (step == AdmissionSession::Step::admitted) admitted_any = true;
            drop(k);
        }
        // Once the rectangle holds every remaining candidate, a pass without
        // admissions leaves the state unchanged, so further passes would too.
        if (covers_all && !admitted_any) break;
        l += cfg.l_step;
    }
    return session.finish(start);
}

SchedulerOutcome fls(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power) {
    const auto start = std::chrono::steady_clock::now();
    check_inputs(users, channels, cfg);
    AdmissionSession session(channels, cfg, p_tx, noise_power);
    if (!users.empty()) {
        const auto order = ordered_by(users.size(), [&](int i) { return users[static_cast<std::size_t>(i)].x(); });
        ordered_admission(session, order, cfg);
    }
    return session.finish(start);
}

SchedulerOutcome dbs(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power) {
    const auto start = std::chrono::steady_clock::now();
    check_inputs(users, channels, cfg);
    AdmissionSession session(channels, cfg, p_tx, noise_power);
    if (!users.empty()) {
        const auto order = ordered_by(users.size(), [&](int i) { return users[static_cast<std::size_t>(i)].r; });
        ordered_admission(session, order, cfg);
    }
    return session.finish(start);
}

SchedulerOutcome sus(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                     double p_tx, double noise_power) {
    const auto start = std::chrono::steady_clock::now();
    check_inputs(users, channels, cfg);
    AdmissionSession session(channels, cfg, p_tx, noise_power);

    const std::size_t count = users.size();
    std::vector<double> norms(count);
    for (std::size_t i = 0; i < count; ++i) norms[i] = channels.col(static_cast<Eigen::Index>(i)).norm();
    std::vector<char> pending(count, 1);
    std::size_t pending_count = count;

    while (pending_count > 0) {
        // Every remaining candidate is projected against the full selected set.
        int best = -1;
        double best_energy = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            if (!pending[i]) continue;
            const double e = session.orthogonal_energy(static_cast<int>(i));
            if (best < 0 || e > best_energy) {
                best = static_cast<int>(i);
                best_energy = e;
            }
        }
        pending[static_cast<std::size_t>(best)] = 0;
        --pending_count;

        const auto step = session.admit(best);
        if (step == AdmissionSession::Step::stop) break;
        if (step == AdmissionSession::Step::rejected) continue;

        if (cfg.sus_alpha) {
            const auto chosen = channels.col(best);
            const CVector corr = channels.adjoint() * chosen;
            for (std::size_t i = 0; i < count; ++i) {
                if (!pending[i]) continue;
                const double c = std::abs(corr(static_cast<Eigen::Index>(i))) /
                                 (norms[i] * norms[static_cast<std::size_t>(best)]);
                if (c > *cfg.sus_alpha) {
                    pending[i] = 0;
                    --pending_count;
                }
            }
        }
    }
    return session.finish(start);
}

SchedulerOutcome greedy(std::span<const UserPosition> users, const CMatrix& channels, const SchedulerConfig& cfg,
                        Rng& rng, double p_tx, double noise_power) {
    const auto start = std::chrono::steady_clock::now();
    check_inputs(users, channels, cfg);
    AdmissionSession session(channels, cfg, p_tx, noise_power);

    std::vector<int> order(users.size());
    std::iota(order.begin(), order.end(), 0);
    // Fisher-Yates on uniform01 so the permutation is identical on every platform.
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    for (const int k : order) {
        session.note_evaluation(k);
        session.admit_if_improves(k);
    }
    return session.finish(start);
}

SchedulerOutcome run_scheduler(SchedulerKind kind, std::span<const UserPosition> users, const CMatrix& channels,
                               const SchedulerConfig& cfg, std::uint64_t seed, double p_tx, double noise_power) {
    switch (kind) {
        case SchedulerKind::rss: return rss(users, channels, cfg, p_tx, noise_power);
        case SchedulerKind::fls: return fls(users, channels, cfg, p_tx, noise_power);
        case SchedulerKind::sus: return sus(users, channels, cfg, p_tx, noise_power);
        case SchedulerKind::dbs: return dbs(users, channels, cfg, p_tx, noise_power);
        case SchedulerKind::greedy: {
            Rng rng(seed);
            return greedy(users, channels, cfg, rng, p_tx, noise_power);
        }
    }
    throw std::invalid_argument("run_scheduler: unknown scheduler");
}

}  // namespace gmimo
