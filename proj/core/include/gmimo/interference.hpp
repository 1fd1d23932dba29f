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

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gmimo/channel.hpp"
#include "gmimo/geometry.hpp"

namespace gmimo {

// Quadratic-phase coefficients of the continuous inter-module sum
//   (1/N) |sum_n exp(j pi (a_bar n^2 + b_bar n))| ~ |int_{-1/2}^{1/2} exp(j pi (a x^2 + b x)) dx|
// with a = N^2 a_bar, b = N b_bar, and the Fresnel limits
//   t_pm = +-sqrt(a/2) + b / sqrt(2a).
struct FresnelParams {
    double a = 0.0;
    double b = 0.0;
    double t_minus = 0.0;
    double t_plus = 0.0;

    // Requires a > 0.
    static FresnelParams from_coefficients(double a, double b);
};

// |a| below this is reported as degenerate geometry: 1/sqrt(2a) would blow up.
inline constexpr double kFresnelDegenerateFloor = 1e-6;

// Dirichlet-kernel removable singularities are resolved when the denominator
// argument is within this distance of a multiple of pi.
inline constexpr double kDirichletSingularTol = 1e-10;

// 1/(MN) |a_j^H a_k|. Throws std::invalid_argument on a length mismatch.
double iui_normalized(const CVector& a_j, const CVector& a_k);

// |sin(count x) / (count sin x)|, equal to 1 at the removable singularities.
double dirichlet_magnitude(double x, int count) noexcept;

// (1/N) |q_j^H q_k| from exact module distances.
double inter_module_correlation(const ArrayConfig& cfg, const UserPosition& user_j,
                                const UserPosition& user_k);

// (1/M) |b(theta_jn)^H b(theta_kn)|.
double intra_module_correlation(const ArrayConfig& cfg, double theta_jn, double theta_kn) noexcept;

// Plane-wave inter-module factor; depends on the angles only.
double inter_module_ff_closed_form(const ArrayConfig& cfg, double theta_j, double theta_k) noexcept;

// Both users in the near field of the whole array. std::nullopt when the
// geometry is degenerate (|a| < kFresnelDegenerateFloor). For a < 0 the users
// swap roles, which flips the sign of both coefficients.
std::optional<FresnelParams> fresnel_params_nf_nf(const ArrayConfig& cfg, const UserPosition& user_j,
                                                  const UserPosition& user_k);

// Near-field user k against a plane-wave user at angle theta_j.
std::optional<FresnelParams> fresnel_params_nf_ff(const ArrayConfig& cfg, const UserPosition& user_k_nf,
                                                  double theta_j);

// (1/sqrt(2a)) |F(t_plus) - F(t_minus)|; the 1/N of the discrete sum is
// carried by a = N^2 a_bar. Throws std::invalid_argument for degenerate a.
double inter_module_fresnel_approx(const FresnelParams& p);

// Distance beyond which every module sees the user at (nearly) the common
// angle: (1/M) |b(theta)^H b(theta_n)| stays >= 0.95 for the outermost module.
double common_angle_min_distance(const ArrayConfig& cfg) noexcept;

// (1/M) |b(theta)^H b(theta_n)| for one module of one user.
double common_angle_fidelity(const ArrayConfig& cfg, const UserPosition& user, double n);

// (1/(MN)) sum_n |b(theta_jn)^H b(theta_kn)|: an upper bound on the IUI of
// the modular ARVs obtained by moving the module sum out of the modulus.
double intra_module_bound(const ArrayConfig& cfg, const UserPosition& user_j, const UserPosition& user_k);

struct MrtRateOptions {
    ArvModel model = ArvModel::phase_only;
    double rate_cap = 1.0e3;  // bits/s/Hz returned when the SINR is unbounded
};

// Rate of user k when every user is served with MRT at equal power.
double mrt_rate(const ArrayConfig& cfg, std::span<const UserPosition> users, std::size_t k,
                double noise_power, const MrtRateOptions& options = {});

struct SweepPoint {
    double theta = 0.0;   // radians
    double iui_sw = 0.0;  // spherical-wave (phase-only) ARVs
    double iui_pw = 0.0;  // plane-wave ARVs; NaN when not requested
};

// IUI between a user at (r, 0) and users at (r, theta) for each theta.
std::vector<SweepPoint> interference_sweep(const ArrayConfig& cfg, double r,
                                           std::span<const double> theta_grid, bool include_pw);

// Columns theta_deg,iui_sw,iui_pw.
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points);

}  // namespace gmimo
