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

#include "gmimo/interference.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gmimo/csv.hpp"
#include "gmimo/fresnel.hpp"

namespace gmimo {

FresnelParams FresnelParams::from_coefficients(double a, double b) {
    if (!(a > 0.0)) throw std::invalid_argument("FresnelParams: a must be positive");
    const double half_width = std::sqrt(0.5 * a);
    const double centre = b / std::sqrt(2.0 * a);
    return FresnelParams{a, b, centre - half_width, centre + half_width};
}

double iui_normalized(const CVector& a_j, const CVector& a_k) {
    if (a_j.size() != a_k.size()) throw std::invalid_argument("iui_normalized: ARV length mismatch");
    if (a_j.size() == 0) throw std::invalid_argument("iui_normalized: empty ARV");
    return std::abs(a_j.dot(a_k)) / static_cast<double>(a_j.size());
}

double dirichlet_magnitude(double x, int count) noexcept {
    if (count == 1) return 1.0;
    const double k = std::round(x / kPi);
    if (std::abs(x - k * kPi) < kDirichletSingularTol) return 1.0;
    return std::abs(std::sin(count * x) / (count * std::sin(x)));
}

double inter_module_correlation(const ArrayConfig& cfg, const UserPosition& user_j,
                                const UserPosition& user_k) {
    const double k = 2.0 * kPi / cfg.wavelength();
    const double sd = cfg.separation_factor * cfg.spacing();
    const double sj = std::sin(user_j.theta);
    const double sk = std::sin(user_k.theta);
    Complex sum{0.0, 0.0};
    for (int sn = 0; sn < cfg.n_modules; ++sn) {
        const double off = cfg.module_index(sn) * sd;
        const double rj = std::sqrt(user_j.r * user_j.r - 2.0 * user_j.r * off * sj + off * off);
        const double rk = std::sqrt(user_k.r * user_k.r - 2.0 * user_k.r * off * sk + off * off);
        const double phase = k * (rk - rj);
        sum += Complex(std::cos(phase), std::sin(phase));
    }
    return std::abs(sum) / cfg.n_modules;
}

double intra_module_correlation(const ArrayConfig& cfg, double theta_jn, double theta_kn) noexcept {
    const double x = kPi * cfg.spacing() * (std::sin(theta_kn) - std::sin(theta_jn)) / cfg.wavelength();
    return dirichlet_magnitude(x, cfg.antennas_per_module);
}

double inter_module_ff_closed_form(const ArrayConfig& cfg, double theta_j, double theta_k) noexcept {
    const double x = kPi * cfg.separation_factor * cfg.spacing() * (std::sin(theta_k) - std::sin(theta_j)) /
                     cfg.wavelength();
    return dirichlet_magnitude(x, cfg.n_modules);
}

namespace {

double quadratic_scale(const ArrayConfig& cfg) noexcept {
    const double nsd = cfg.n_modules * cfg.separation_factor * cfg.spacing();
    return nsd * nsd / cfg.wavelength();
}

double linear_coefficient(const ArrayConfig& cfg, double theta_j, double theta_k) noexcept {
    return -2.0 * cfg.n_modules * cfg.separation_factor * cfg.spacing() *
           (std::sin(theta_k) - std::sin(theta_j)) / cfg.wavelength();
}

std::optional<FresnelParams> make_params(double a, double b) {
    if (!(std::abs(a) >= kFresnelDegenerateFloor)) return std::nullopt;
    if (a < 0.0) {
        a = -a;
        b = -b;
    }
    return FresnelParams::from_coefficients(a, b);
}

}  // namespace

std::optional<FresnelParams> fresnel_params_nf_nf(const ArrayConfig& cfg, const UserPosition& user_j,
                                                  const UserPosition& user_k) {
    const double cj = std::cos(user_j.theta);
    const double ck = std::cos(user_k.theta);
    const double a = quadratic_scale(cfg) * (ck * ck / user_k.r - cj * cj / user_j.r);
    return make_params(a, linear_coefficient(cfg, user_j.theta, user_k.theta));
}

std::optional<FresnelParams> fresnel_params_nf_ff(const ArrayConfig& cfg, const UserPosition& user_k_nf,
                                                  double theta_j) {
    const double ck = std::cos(user_k_nf.theta);
    const double a = quadratic_scale(cfg) * ck * ck / user_k_nf.r;
    return make_params(a, linear_coefficient(cfg, theta_j, user_k_nf.theta));
}

double inter_module_fresnel_approx(const FresnelParams& p) {
    if (!(p.a >= kFresnelDegenerateFloor)) {
        throw std::invalid_argument("inter_module_fresnel_approx: degenerate quadratic coefficient");
    }
    return std::abs(fresnel(p.t_plus) - fresnel(p.t_minus)) / std::sqrt(2.0 * p.a);
}

double common_angle_min_distance(const ArrayConfig& cfg) noexcept {
    // sin(0.18 pi) / (0.18 pi) ~ 0.95 fixes the tolerated sine offset.
    const double epsilon = 2.0 / cfg.antennas_per_module * 0.18;
    return (cfg.n_modules - 1) * cfg.separation_factor * cfg.spacing() / (2.0 * epsilon);
}

double common_angle_fidelity(const ArrayConfig& cfg, const UserPosition& user, double n) {
    const double theta_n = module_angle(cfg, user, n);
    return intra_module_correlation(cfg, user.theta, theta_n);
}

double intra_module_bound(const ArrayConfig& cfg, const UserPosition& user_j, const UserPosition& user_k) {
    double total = 0.0;
    for (int sn = 0; sn < cfg.n_modules; ++sn) {
        const double n = cfg.module_index(sn);
        total += intra_module_correlation(cfg, module_angle(cfg, user_j, n), module_angle(cfg, user_k, n));
    }
    return total / cfg.n_modules;
}

double mrt_rate(const ArrayConfig& cfg, std::span<const UserPosition> users, std::size_t k,
                double noise_power, const MrtRateOptions& options) {
    if (k >= users.size()) throw std::out_of_range("mrt_rate: user index out of range");
    auto arv = [&](const UserPosition& u) {
        return options.model == ArvModel::exact ? arv_exact(cfg, u) : arv_phase_only(cfg, u);
    };
    const Arv a_k = arv(users[k]);
    const double self = iui_normalized(a_k, a_k);
    double interference = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (i == k) continue;
        const double v = iui_normalized(arv(users[i]), a_k);
        interference += v * v;
    }
    const double r2 = users[k].r * users[k].r;
    const double beta = cfg.reference_gain;
    const double denominator = interference + noise_power * r2 * r2 / (beta * beta);
    if (!(denominator > 0.0)) return options.rate_cap;
    return std::min(options.rate_cap, std::log2(1.0 + self * self / denominator));
}

std::vector<SweepPoint> interference_sweep(const ArrayConfig& cfg, double r,
                                           std::span<const double> theta_grid, bool include_pw) {
    const UserPosition reference{r, 0.0};
    const Arv ref_sw = arv_phase_only(cfg, reference);
    const Arv ref_pw = include_pw ? arv_farfield(cfg, reference) : Arv{};
    std::vector<SweepPoint> out;
    out.reserve(theta_grid.size());
    for (const double theta : theta_grid) {
        const UserPosition u{r, theta};
        SweepPoint p;
        p.theta = theta;
        p.iui_sw = iui_normalized(ref_sw, arv_phase_only(cfg, u));
        p.iui_pw = include_pw ? iui_normalized(ref_pw, arv_farfield(cfg, u))
                              : std::numeric_limits<double>::quiet_NaN();
        out.push_back(p);
    }
    return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
    out << "theta_deg,iui_sw,iui_pw\n";
    for (const auto& p : points) {
        out << csv::number(p.theta * 180.0 / kPi) << ',' << csv::number(p.iui_sw) << ','
            << csv::number(p.iui_pw) << '\n';
    }
}

}  // namespace gmimo
