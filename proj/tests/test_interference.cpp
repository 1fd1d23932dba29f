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
#include <sstream>
#include <vector>

#include "gmimo/channel.hpp"
#include "gmimo/fresnel.hpp"
#include "gmimo/interference.hpp"
#include "support.hpp"

using namespace gmimo;
using gmimo::test::deg;
using gmimo::test::uniform;

namespace {

double quad_scale(const ArrayConfig& cfg) {
    const double nsd = cfg.n_modules * cfg.separation_factor * cfg.spacing();
    return nsd * nsd / cfg.wavelength();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

TEST(Iui, SelfOrthogonalAndBruteForce) {
    const auto cfg = presets::modular();
    const Arv a = arv_phase_only(cfg, {20.0, deg(10)});
    EXPECT_NEAR(iui_normalized(a, a), 1.0, 1e-12);

    CVector e1 = CVector::Zero(4), e2 = CVector::Zero(4);
    e1(0) = 1.0;
    e2(1) = 1.0;
    EXPECT_EQ(iui_normalized(e1, e2), 0.0);

    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        const Arv aj = arv_phase_only(cfg, test::random_user(rng, 10, 60));
        const Arv ak = arv_phase_only(cfg, test::random_user(rng, 10, 60));
        Complex sum = 0.0;
        for (Eigen::Index n = 0; n < aj.size(); ++n) sum += std::conj(aj(n)) * ak(n);
        EXPECT_NEAR(iui_normalized(aj, ak), std::abs(sum) / 128.0, 1e-13);
    }
    EXPECT_THROW(iui_normalized(a, e1), std::invalid_argument);
}

TEST(Iui, InterModuleCorrelation) {
    const auto cfg = presets::modular();
    const UserPosition u{25.0, deg(-20)};
    EXPECT_NEAR(inter_module_correlation(cfg, u, u), 1.0, 1e-12);
    EXPECT_NEAR(inter_module_correlation(presets::collocated(), u, {40.0, deg(33)}), 1.0, 1e-12);

    Rng rng(32);
    for (int i = 0; i < 50; ++i) {
        const auto uj = test::random_user(rng, 10, 100);
        const auto uk = test::random_user(rng, 10, 100);
        const double oracle = std::abs(q_nearfield(cfg, uj).dot(q_nearfield(cfg, uk))) / cfg.n_modules;
        EXPECT_NEAR(inter_module_correlation(cfg, uj, uk), oracle, 1e-12);
    }
}

TEST(Iui, IntraModuleDirichlet) {
    const auto cfg = presets::modular();
    EXPECT_DOUBLE_EQ(intra_module_correlation(cfg, 0.3, 0.3), 1.0);
    EXPECT_DOUBLE_EQ(intra_module_correlation(presets::sparse(), 0.1, 0.9), 1.0);
    // d = lambda/2, M = 4: first null at sin difference 1/2.
    EXPECT_NEAR(intra_module_correlation(cfg, 0.0, std::asin(0.5)), 0.0, 1e-12);
    // Continuity through the removable singularity.
    EXPECT_NEAR(intra_module_correlation(cfg, 0.2, 0.2 + 1e-9), 1.0, 1e-9);
    EXPECT_NEAR(intra_module_correlation(cfg, 0.2, 0.2 + 1e-6), 1.0, 1e-9);
}

TEST(Iui, FarFieldClosedForm) {
    const auto cfg = presets::modular();
    const double ns = cfg.n_modules * cfg.separation_factor;
    EXPECT_DOUBLE_EQ(inter_module_ff_closed_form(cfg, 0.4, 0.4), 1.0);
    EXPECT_NEAR(inter_module_ff_closed_form(cfg, 0.0, std::asin(2.0 / ns)), 0.0, 1e-12);
    // Grating lobe: sin difference 2/S puts the denominator on a multiple of pi.
    EXPECT_NEAR(inter_module_ff_closed_form(cfg, 0.0, std::asin(2.0 / cfg.separation_factor)), 1.0, 1e-9);
    const double lobe = std::asin(2.0 / cfg.separation_factor);
    EXPECT_NEAR(inter_module_ff_closed_form(cfg, 0.0, lobe + 1e-11), 1.0, 1e-6);
}

TEST(Iui, FarFieldFactorisation) {
    const auto cfg = presets::modular();
    Rng rng(33);
    for (int i = 0; i < 500; ++i) {
        const UserPosition uj{5000.0, uniform(rng, -kPi / 2, kPi / 2)};
        const UserPosition uk{5000.0, uniform(rng, -kPi / 2, kPi / 2)};
        const double direct = iui_normalized(arv_farfield(cfg, uj), arv_farfield(cfg, uk));
        const double product = inter_module_ff_closed_form(cfg, uj.theta, uk.theta) *
                               intra_module_correlation(cfg, uj.theta, uk.theta);
        EXPECT_NEAR(direct, product, 1e-12);
    }
}

TEST(FresnelParams, LimitsFromCompletedSquare) {
    const auto p = FresnelParams::from_coefficients(8.0, 3.0);
    EXPECT_DOUBLE_EQ(p.t_minus, -2.0 + 3.0 / 4.0);
    EXPECT_DOUBLE_EQ(p.t_plus, 2.0 + 3.0 / 4.0);
    EXPECT_GT(p.t_plus, p.t_minus);
}

TEST(FresnelParams, FresnelMatchesQuadraticPhaseIntegral) {
    // (1/sqrt(2a)) |F(t+) - F(t-)| is |int_{-1/2}^{1/2} exp(j pi (a x^2 + b x)) dx|.
    for (const auto& [a, b] : {std::pair{0.7, 0.0}, {3.0, 1.2}, {12.0, -5.0}, {40.0, 9.0}}) {
        const int steps = 200000;
        Complex sum = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double x = -0.5 + static_cast<double>(i) / steps;
            const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
            sum += w * std::exp(Complex(0.0, kPi * (a * x * x + b * x)));
        }
        const double integral = std::abs(sum) / steps;
        EXPECT_NEAR(inter_module_fresnel_approx(FresnelParams::from_coefficients(a, b)), integral, 1e-8)
            << "a=" << a << " b=" << b;
    }
}

TEST(FresnelParams, NearFieldPairs) {
    const auto cfg = presets::modular();
    const UserPosition u{20.0, 0.3};
    EXPECT_FALSE(fresnel_params_nf_nf(cfg, u, u).has_value());
    EXPECT_FALSE(fresnel_params_nf_nf(cfg, {30.0, deg(25)}, {30.0, deg(-25)}).has_value());

    const UserPosition uk{20.0, 0.0};
    const UserPosition uj{30.0, deg(30)};
    const auto p = fresnel_params_nf_nf(cfg, uj, uk);
    ASSERT_TRUE(p.has_value());
    EXPECT_NEAR(p->a, quad_scale(cfg) * (1.0 / 20.0 - 0.75 / 30.0), 1e-9);
    const double b = -2.0 * cfg.n_modules * cfg.separation_factor * cfg.spacing() * (0.0 - 0.5) / cfg.wavelength();
    EXPECT_NEAR(p->b, b, 1e-9);

    // Swapping makes a negative; normalising back flips b a second time.
    const auto swapped = fresnel_params_nf_nf(cfg, uk, uj);
    ASSERT_TRUE(swapped.has_value());
    EXPECT_NEAR(swapped->a, p->a, 1e-9);
    EXPECT_NEAR(swapped->b, p->b, 1e-9);
    EXPECT_NEAR(inter_module_fresnel_approx(*swapped), inter_module_fresnel_approx(*p), 1e-12);
}

TEST(FresnelParams, NearFarPairs) {
    const auto cfg = presets::modular();
    EXPECT_FALSE(fresnel_params_nf_ff(cfg, {20.0, kPi / 2}, 0.0).has_value());
    EXPECT_FALSE(fresnel_params_nf_ff(cfg, {20.0, -kPi / 2}, 0.0).has_value());
    EXPECT_FALSE(fresnel_params_nf_ff(cfg, {1e20, 0.0}, 0.0).has_value());
    const auto p = fresnel_params_nf_ff(cfg, {20.0, 0.0}, 0.2);
    ASSERT_TRUE(p.has_value());
    EXPECT_NEAR(p->a, quad_scale(cfg) / 20.0, 1e-9);
    EXPECT_THROW(inter_module_fresnel_approx(FresnelParams{}), std::invalid_argument);
}

TEST(FresnelParams, EnvelopeForZeroLinearTerm) {
    const double a = 1e4;
    const double value = inter_module_fresnel_approx(FresnelParams::from_coefficients(a, 0.0));
    EXPECT_NEAR(value, 2.0 * std::sqrt(0.5) / std::sqrt(2.0 * a), 0.01 * value);
}

TEST(FresnelParams, ApproximatesExactSum) {
    const auto cfg = presets::modular();
    ScenarioConfig pairs;  // uniform in area over the near sector
    pairs.num_users = 2;
    Rng rng(34);
    std::vector<double> errors;
    while (errors.size() < 300) {
        const auto drawn = sample_users(pairs, rng);
        const auto& uj = drawn[0];
        const auto& uk = drawn[1];
        const auto p = fresnel_params_nf_nf(cfg, uj, uk);
        if (!p || p->a < 0.5 || (p->a + std::abs(p->b)) / cfg.n_modules >= 1.0) continue;
        const double exact = inter_module_correlation(cfg, uj, uk);
        errors.push_back(std::abs(inter_module_fresnel_approx(*p) - exact) / exact);
    }
    EXPECT_LE(median(errors), 0.10);
}

TEST(CommonAngle, GoldenDistance) {
    const auto cfg = presets::modular();
    EXPECT_NEAR(common_angle_min_distance(cfg), 22.3734, 1e-3);
    EXPECT_EQ(common_angle_min_distance(presets::collocated()), 0.0);
    ArrayConfig doubled = cfg;
    doubled.antennas_per_module = 8;
    EXPECT_NEAR(common_angle_min_distance(doubled), 2.0 * common_angle_min_distance(cfg), 1e-12);
}

TEST(CommonAngle, FidelityAboveAndBelowBound) {
    const auto cfg = presets::modular();
    const double n = cfg.module_index(cfg.n_modules - 1);
    const double bound = common_angle_min_distance(cfg);
    double worst_above = 1.0;
    double worst_close = 1.0;
    for (double theta = -kPi / 2 + 1e-3; theta < kPi / 2; theta += 1e-3) {
        for (const double r : {bound, 1.5 * bound, 4.0 * bound}) {
            worst_above = std::min(worst_above, common_angle_fidelity(cfg, {r, theta}, n));
        }
        worst_close = std::min(worst_close, common_angle_fidelity(cfg, {11.0, theta}, n));
    }
    EXPECT_GE(worst_above, 0.95);
    EXPECT_LT(worst_close, 0.95);
}

TEST(CommonAngle, TriangleBoundHolds) {
    const auto cfg = presets::modular();
    Rng rng(35);
    for (int i = 0; i < 300; ++i) {
        const auto uj = test::random_user(rng, 10.0, 200.0);
        const auto uk = test::random_user(rng, 10.0, 200.0);
        const double exact = iui_normalized(arv_modular(cfg, uj), arv_modular(cfg, uk));
        EXPECT_LE(exact, intra_module_bound(cfg, uj, uk) + 1e-9);
    }
}

TEST(MrtRate, Cases) {
    const auto cfg = presets::modular();
    const std::vector<UserPosition> lone{{15.0, 0.2}};
    EXPECT_EQ(mrt_rate(cfg, lone, 0, 0.0), 1e3);
    MrtRateOptions capped;
    capped.rate_cap = 50.0;
    EXPECT_EQ(mrt_rate(cfg, lone, 0, 0.0, capped), 50.0);

    const double sigma2 = 1e-6;
    const std::vector<UserPosition> twins{{20.0, 0.1}, {20.0, 0.1}};
    const double r4 = std::pow(20.0, 4);
    EXPECT_NEAR(mrt_rate(cfg, twins, 0, sigma2), std::log2(1.0 + 1.0 / (1.0 + sigma2 * r4)), 1e-12);

    const std::vector<UserPosition> three{{12.0, 0.3}, {25.0, -0.2}, {40.0, 0.7}};
    for (std::size_t k = 0; k < 3; ++k) {
        const Arv ak = arv_phase_only(cfg, three[k]);
        double interference = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            if (i == k) continue;
            const double v = std::abs(arv_phase_only(cfg, three[i]).dot(ak)) / 128.0;
            interference += v * v;
        }
        const double rk4 = std::pow(three[k].r, 4);
        EXPECT_NEAR(mrt_rate(cfg, three, k, sigma2), std::log2(1.0 + 1.0 / (interference + sigma2 * rk4)), 1e-12);
    }
    EXPECT_THROW(mrt_rate(cfg, three, 3, sigma2), std::out_of_range);
}

TEST(Sweep, ShapeAndLimits) {
    const auto cfg = presets::modular();
    std::vector<double> grid;
    for (double t = -10.0; t <= 10.0 + 1e-9; t += 0.25) grid.push_back(deg(t));

    const auto near = interference_sweep(cfg, 20.0, grid, true);
    const auto far = interference_sweep(cfg, 150.0, grid, true);
    ASSERT_EQ(near.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(near[i].iui_pw, far[i].iui_pw, 1e-12);
        EXPECT_NEAR(far[i].iui_sw, far[i].iui_pw, 0.05) << grid[i];
        if (grid[i] == 0.0) {
            EXPECT_NEAR(near[i].iui_sw, 1.0, 1e-12);
            EXPECT_NEAR(near[i].iui_pw, 1.0, 1e-12);
        }
    }
    const auto no_pw = interference_sweep(cfg, 20.0, grid, false);
    EXPECT_TRUE(std::isnan(no_pw.front().iui_pw));

    std::ostringstream out;
    write_sweep_csv(out, near);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "theta_deg,iui_sw,iui_pw");
}
