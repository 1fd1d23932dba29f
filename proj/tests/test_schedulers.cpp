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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "gmimo/errors.hpp"
#include "gmimo/harness.hpp"
#include "gmimo/schedulers.hpp"
#include "support.hpp"

using namespace gmimo;

namespace {

struct Drop {
    std::vector<UserPosition> users;
    CMatrix h;
    double p_tx = 0.0;
    double noise = 1.0;
};

Drop make_drop(std::uint64_t seed, int k, double snr_db = 25.0) {
    ScenarioConfig sc = scenarios::near_sector();
    sc.num_users = k;
    Rng rng(seed);
    Drop d;
    d.users = sample_users(sc, rng);
    const auto cfg = presets::modular();
    d.h = channel_matrix(cfg, d.users);
    d.p_tx = transmit_power(snr_db, d.noise, cfg.reference_gain);
    return d;
}

// Water level by bisection; independent of the library's sorted sweep.
double waterfill_se(const std::vector<double>& gains, double p_tx) {
    double lo = 0.0;
    double hi = p_tx + 1.0 / *std::min_element(gains.begin(), gains.end());
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        double used = 0.0;
        for (const double g : gains) used += std::max(0.0, mid - 1.0 / g);
        (used > p_tx ? hi : lo) = mid;
    }
    double se = 0.0;
    for (const double g : gains) se += std::log2(1.0 + std::max(0.0, lo - 1.0 / g) * g);
    return se;
}

// Direct-inverse reference of the shared admission machinery.
class Reference {
public:
    Reference(const CMatrix& h, double p_tx, double noise) : h_(h), p_tx_(p_tx), noise_(noise) {}

    CMatrix basis() const {
        CMatrix q(h_.rows(), static_cast<Eigen::Index>(selected.size()));
        for (std::size_t i = 0; i < selected.size(); ++i) {
            CVector v = h_.col(selected[i]);
            for (std::size_t j = 0; j < i; ++j) v -= q.col(j).dot(v) * q.col(j);
            q.col(i) = v.normalized();
        }
        return q;
    }

    double residual_fraction(int k) const {
        const CMatrix q = basis();
        const CVector h = h_.col(k);
        return (h - q * (q.adjoint() * h)).squaredNorm() / h.squaredNorm();
    }

    double se_with(int k) const {
        std::vector<int> s = selected;
        s.push_back(k);
        CMatrix hs(h_.rows(), static_cast<Eigen::Index>(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i) hs.col(i) = h_.col(s[i]);
        const CMatrix g = (hs.adjoint() * hs).inverse();
        std::vector<double> gains(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) gains[i] = 1.0 / (noise_ * g(i, i).real());
        return waterfill_se(gains, p_tx_);
    }

    std::vector<int> selected;
    double best = 0.0;

private:
    const CMatrix& h_;
    double p_tx_;
    double noise_;
};

std::vector<int> reference_ordered(const Drop& d, const std::vector<int>& order, double mu) {
    Reference ref(d.h, d.p_tx, d.noise);
    for (const int k : order) {
        if (ref.residual_fraction(k) < mu) continue;
        const double se = ref.se_with(k);
        if (se < ref.best) break;
        ref.best = se;
        ref.selected.push_back(k);
    }
    return ref.selected;
}

std::vector<int> sorted_indices(std::size_t n, auto key) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
    return order;
}

void expect_valid_selection(const SchedulerOutcome& out, const Drop& d) {
    const auto& sel = out.result.selected;
    std::set<int> unique(sel.begin(), sel.end());
    EXPECT_EQ(unique.size(), sel.size());
    for (const int k : sel) {
        EXPECT_GE(k, 0);
        EXPECT_LT(k, static_cast<int>(d.users.size()));
    }
    ASSERT_EQ(out.result.precoders.cols(), static_cast<Eigen::Index>(sel.size()));
    EXPECT_EQ(out.result.powers.size(), sel.size());
    double power = 0.0;
    for (const double p : out.result.powers) power += p;
    if (!sel.empty()) {
        EXPECT_NEAR(power, d.p_tx, 1e-9 * d.p_tx);
    }
    for (std::size_t i = 0; i < sel.size(); ++i) {
        for (std::size_t j = 0; j < sel.size(); ++j) {
            const double c = std::abs(d.h.col(sel[i]).dot(out.result.precoders.col(static_cast<Eigen::Index>(j))));
            if (i != j) {
                EXPECT_LE(c, 1e-6 * d.h.col(sel[i]).norm());
            }
        }
    }
    EXPECT_NEAR(std::accumulate(out.result.rates.begin(), out.result.rates.end(), 0.0), out.result.sum_se, 1e-9);
}

}  // namespace

TEST(Schedulers, NamesRoundTrip) {
    for (const auto kind : kAllSchedulers) EXPECT_EQ(scheduler_from_string(to_string(kind)), kind);
    EXPECT_FALSE(scheduler_from_string("RSS").has_value());
}

TEST(Schedulers, ConfigValidation) {
    auto field_of = [](const SchedulerConfig& cfg) {
        try {
            cfg.validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string{};
    };
    SchedulerConfig cfg;
    EXPECT_EQ(field_of(cfg), "");
    cfg.mu = 1.0;
    EXPECT_EQ(field_of(cfg), "scheduler.mu");
    cfg.gamma_variant = GammaVariant::as_written;
    cfg.mu = 2.0;
    EXPECT_EQ(field_of(cfg), "");
    cfg.l_init = 0.0;
    EXPECT_EQ(field_of(cfg), "scheduler.l_init");
    cfg = {};
    cfg.l_step = -1.0;
    EXPECT_EQ(field_of(cfg), "scheduler.l_step");
    cfg = {};
    cfg.sus_alpha = 1.5;
    EXPECT_EQ(field_of(cfg), "scheduler.sus_alpha");
}

TEST(Schedulers, RejectsMismatchedInputs) {
    const Drop d = make_drop(1, 5);
    const std::vector<UserPosition> fewer(d.users.begin(), d.users.begin() + 4);
    EXPECT_THROW(fls(fewer, d.h, {}, d.p_tx, d.noise), std::invalid_argument);
}

TEST(Schedulers, EmptyPool) {
    const std::vector<UserPosition> none;
    const CMatrix h(128, 0);
    for (const auto kind : kAllSchedulers) {
        const auto out = run_scheduler(kind, none, h, {}, 1, 10.0, 1.0);
        EXPECT_TRUE(out.result.selected.empty()) << to_string(kind);
        EXPECT_EQ(out.result.precoders.rows(), 128);
        EXPECT_EQ(out.result.precoders.cols(), 0);
        EXPECT_EQ(out.result.sum_se, 0.0);
    }
}

TEST(Schedulers, SingleUserGetsFullPower) {
    const Drop d = make_drop(2, 1);
    const double oracle = std::log2(1.0 + d.p_tx * d.h.col(0).squaredNorm() / d.noise);
    for (const auto kind : kAllSchedulers) {
        const auto out = run_scheduler(kind, d.users, d.h, {}, 3, d.p_tx, d.noise);
        ASSERT_EQ(out.result.selected, std::vector<int>{0}) << to_string(kind);
        EXPECT_NEAR(out.result.sum_se, oracle, 1e-9);
    }
}

TEST(Schedulers, DuplicateUserIsServedOnce) {
    Drop d = make_drop(3, 2);
    d.users[1] = d.users[0];
    d.h.col(1) = d.h.col(0);
    for (const auto kind : kAllSchedulers) {
        const auto out = run_scheduler(kind, d.users, d.h, {}, 4, d.p_tx, d.noise);
        EXPECT_EQ(out.result.selected.size(), 1u) << to_string(kind);
    }
}

TEST(Schedulers, OutputsAreValidZeroForcingSelections) {
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const Drop d = make_drop(seed, 120);
        for (const auto kind : kAllSchedulers) {
            const auto out = run_scheduler(kind, d.users, d.h, {}, seed, d.p_tx, d.noise);
            SCOPED_TRACE(std::string(to_string(kind)));
            EXPECT_FALSE(out.result.selected.empty());
            expect_valid_selection(out, d);
            EXPECT_GE(out.runtime_s, 0.0);
            EXPECT_EQ(out.candidate_evaluations, out.evaluation_trace.size());
        }
    }
}

TEST(Schedulers, FrontLineMatchesReference) {
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        const Drop d = make_drop(seed, 80);
        const auto order = sorted_indices(d.users.size(), [&](int i) { return d.users[i].x(); });
        EXPECT_EQ(fls(d.users, d.h, {}, d.p_tx, d.noise).result.selected, reference_ordered(d, order, 0.5));
    }
}

TEST(Schedulers, DistanceBasedMatchesReference) {
    for (std::uint64_t seed = 30; seed < 34; ++seed) {
        const Drop d = make_drop(seed, 80);
        const auto order = sorted_indices(d.users.size(), [&](int i) { return d.users[i].r; });
        EXPECT_EQ(dbs(d.users, d.h, {}, d.p_tx, d.noise).result.selected, reference_ordered(d, order, 0.5));
    }
}

TEST(Schedulers, SemiOrthogonalMatchesReference) {
    for (std::uint64_t seed = 40; seed < 43; ++seed) {
        const Drop d = make_drop(seed, 60);
        Reference ref(d.h, d.p_tx, d.noise);
        std::vector<char> open(d.users.size(), 1);
        for (;;) {
            int best = -1;
            double energy = -1.0;
            for (std::size_t i = 0; i < open.size(); ++i) {
                if (!open[i]) continue;
                const double e = d.h.col(static_cast<Eigen::Index>(i)).squaredNorm() *
                                 ref.residual_fraction(static_cast<int>(i));
                if (e > energy) {
                    energy = e;
                    best = static_cast<int>(i);
                }
            }
            if (best < 0) break;
            open[best] = 0;
            const double se = ref.se_with(best);
            if (se < ref.best) break;
            ref.best = se;
            ref.selected.push_back(best);
        }
        const auto out = sus(d.users, d.h, {}, d.p_tx, d.noise);
        EXPECT_EQ(out.result.selected, ref.selected);
        // First pick is the strongest channel.
        int strongest = 0;
        for (Eigen::Index i = 1; i < d.h.cols(); ++i) {
            if (d.h.col(i).squaredNorm() > d.h.col(strongest).squaredNorm()) strongest = static_cast<int>(i);
        }
        EXPECT_EQ(out.result.selected.front(), strongest);
    }
}

TEST(Schedulers, GreedyReplaysItsOwnOrder) {
    const Drop d = make_drop(50, 70);
    Rng rng(99);
    const auto out = greedy(d.users, d.h, {}, rng, d.p_tx, d.noise);
    ASSERT_EQ(out.evaluation_trace.size(), d.users.size());
    std::set<int> visited(out.evaluation_trace.begin(), out.evaluation_trace.end());
    EXPECT_EQ(visited.size(), d.users.size());

    Reference ref(d.h, d.p_tx, d.noise);
    for (const int k : out.evaluation_trace) {
        if (ref.residual_fraction(k) < 1e-10) continue;
        const double se = ref.se_with(k);
        if (se > ref.best) {
            ref.best = se;
            ref.selected.push_back(k);
        }
    }
    EXPECT_EQ(out.result.selected, ref.selected);

    Rng same(99);
    EXPECT_EQ(greedy(d.users, d.h, {}, same, d.p_tx, d.noise).evaluation_trace, out.evaluation_trace);
    Rng other(100);
    EXPECT_NE(greedy(d.users, d.h, {}, other, d.p_tx, d.noise).evaluation_trace, out.evaluation_trace);
}

TEST(Schedulers, RectangleCoveringEverythingIsFrontLine) {
    for (std::uint64_t seed = 60; seed < 64; ++seed) {
        const Drop d = make_drop(seed, 100);
        SchedulerConfig wide;
        wide.l_init = 1e3;
        const auto a = rss(d.users, d.h, wide, d.p_tx, d.noise);
        const auto b = fls(d.users, d.h, wide, d.p_tx, d.noise);
        EXPECT_EQ(a.result.selected, b.result.selected);
        EXPECT_EQ(a.evaluation_trace, b.evaluation_trace);
    }
}

TEST(Schedulers, RectangleSearchStartsInsideInitialRectangle) {
    const Drop d = make_drop(70, 150);
    SchedulerConfig cfg;
    cfg.l_init = 20.0;
    const auto out = rss(d.users, d.h, cfg, d.p_tx, d.noise);
    ASSERT_FALSE(out.evaluation_trace.empty());
    double min_x = 1e9;
    int first = -1;
    for (std::size_t i = 0; i < d.users.size(); ++i) {
        if (d.users[i].x() < 20.0 && std::abs(d.users[i].y()) < 20.0 && d.users[i].x() < min_x) {
            min_x = d.users[i].x();
            first = static_cast<int>(i);
        }
    }
    ASSERT_GE(first, 0);
    EXPECT_EQ(out.evaluation_trace.front(), first);
    // Nothing outside the first rectangle is visited before everything inside it.
    std::size_t inside = 0;
    for (const auto& u : d.users) inside += (u.x() < 20.0 && std::abs(u.y()) < 20.0);
    for (std::size_t i = 0; i < std::min(inside, out.evaluation_trace.size()); ++i) {
        const auto& u = d.users[out.evaluation_trace[i]];
        EXPECT_TRUE(u.x() < 20.0 && std::abs(u.y()) < 20.0);
    }
}

TEST(Schedulers, RectangleSearchTerminatesWhenGammaRejectsEveryone) {
    const Drop d = make_drop(71, 60);
    SchedulerConfig strict;
    strict.mu = 0.999999;
    strict.l_init = 1.0;
    const auto out = rss(d.users, d.h, strict, d.p_tx, d.noise);
    EXPECT_GE(out.result.selected.size(), 1u);
    EXPECT_LE(out.candidate_evaluations, d.users.size());
}

TEST(Schedulers, ExhaustionServesAtLeastAsMany) {
    for (std::uint64_t seed = 80; seed < 83; ++seed) {
        const Drop d = make_drop(seed, 100);
        SchedulerConfig all;
        all.stopping = StoppingRule::exhaustion;
        for (const auto kind : {SchedulerKind::rss, SchedulerKind::fls, SchedulerKind::dbs, SchedulerKind::sus}) {
            const auto stop = run_scheduler(kind, d.users, d.h, {}, seed, d.p_tx, d.noise);
            const auto full = run_scheduler(kind, d.users, d.h, all, seed, d.p_tx, d.noise);
            EXPECT_GE(full.result.selected.size(), stop.result.selected.size()) << to_string(kind);
            // Stopping selection is a prefix of the exhaustive one.
            EXPECT_TRUE(std::equal(stop.result.selected.begin(), stop.result.selected.end(),
                                   full.result.selected.begin()))
                << to_string(kind);
        }
    }
}

TEST(Schedulers, AsWrittenGammaRetestsRejectedUsers) {
    const Drop d = make_drop(91, 100);
    SchedulerConfig cfg;
    cfg.gamma_variant = GammaVariant::as_written;
    cfg.mu = 1.2;
    const auto out = fls(d.users, d.h, cfg, d.p_tx, d.noise);
    expect_valid_selection(out, d);
    // Under this variant gamma >= 1 always, so mu <= 1 admits everyone tested.
    cfg.mu = 1.0;
    cfg.stopping = StoppingRule::exhaustion;
    const auto everyone = fls(d.users, d.h, cfg, d.p_tx, d.noise);
    EXPECT_EQ(everyone.result.selected.size(), std::min<std::size_t>(d.users.size(), 128));
}

TEST(Schedulers, SusPruningOnlyRemovesCandidates) {
    const Drop d = make_drop(92, 120);
    SchedulerConfig pruned;
    pruned.sus_alpha = 0.3;
    const auto plain = sus(d.users, d.h, {}, d.p_tx, d.noise);
    const auto out = sus(d.users, d.h, pruned, d.p_tx, d.noise);
    expect_valid_selection(out, d);
    EXPECT_LE(out.candidate_evaluations, plain.candidate_evaluations);
    for (std::size_t i = 0; i < out.result.selected.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const auto a = d.h.col(out.result.selected[i]);
            const auto b = d.h.col(out.result.selected[j]);
            EXPECT_LE(std::abs(a.dot(b)) / (a.norm() * b.norm()), 0.3 + 1e-12);
        }
    }
}

TEST(Schedulers, SelectionIgnoresCandidateLabels) {
    // Permuting the pool permutes the selection (no ties in continuous data).
    const Drop d = make_drop(93, 90);
    std::vector<int> perm(d.users.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    Drop p = d;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        p.users[i] = d.users[perm[i]];
        p.h.col(static_cast<Eigen::Index>(i)) = d.h.col(perm[i]);
    }
    for (const auto kind : {SchedulerKind::rss, SchedulerKind::fls, SchedulerKind::dbs, SchedulerKind::sus}) {
        auto a = run_scheduler(kind, d.users, d.h, {}, 1, d.p_tx, d.noise).result.selected;
        auto b = run_scheduler(kind, p.users, p.h, {}, 1, p.p_tx, p.noise).result.selected;
        for (auto& k : b) k = perm[k];
        EXPECT_EQ(a, b) << to_string(kind);
    }
}

TEST(Schedulers, TiesGoToLowestIndex) {
    // Two mirror-image users share x and r.
    const auto cfg = presets::modular();
    const std::vector<UserPosition> users{{30.0, 0.4}, {30.0, -0.4}};
    const CMatrix h = channel_matrix(cfg, users);
    const double p_tx = transmit_power(25.0, 1.0, cfg.reference_gain);
    SchedulerConfig exhaust;
    exhaust.stopping = StoppingRule::exhaustion;
    for (const auto kind : {SchedulerKind::fls, SchedulerKind::dbs, SchedulerKind::sus}) {
        const auto out = run_scheduler(kind, users, h, exhaust, 1, p_tx, 1.0);
        ASSERT_FALSE(out.evaluation_trace.empty());
        EXPECT_EQ(out.evaluation_trace.front(), 0) << to_string(kind);
    }
}
