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

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "gmimo/geometry.hpp"

namespace gmimo {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Array response vector over all N*M elements. Layout is modules-major:
// entry slot_n * M + slot_m, modules ascending, antennas ascending within each.
using Arv = CVector;

enum class ArvModel {
    phase_only,  // unit-modulus spherical wave (default channel model)
    exact,       // spherical wave with r / r_{n,m} amplitude taper
};

struct ChannelVector {
    CVector values;
    UserPosition user;
};

Arv arv_exact(const ArrayConfig& cfg, const UserPosition& user);
Arv arv_phase_only(const ArrayConfig& cfg, const UserPosition& user);

// Per-module near-field delays exp(-j 2 pi r_n / lambda), length N.
CVector q_nearfield(const ArrayConfig& cfg, const UserPosition& user);

// Plane-wave delays using r_n ~ r - n S d sin(theta), length N.
CVector q_farfield(const ArrayConfig& cfg, const UserPosition& user);

// Intra-module steering vector exp(+j 2 pi m d sin(angle) / lambda), length M.
CVector b_steering(const ArrayConfig& cfg, double angle);

// Modular factorisation (q (x) 1_M) .* u, each module steered at its own angle.
Arv arv_modular(const ArrayConfig& cfg, const UserPosition& user);

// Plane-wave ARV q_farfield (x) b_steering(theta).
Arv arv_farfield(const ArrayConfig& cfg, const UserPosition& user);

// LoS channel sqrt(beta_0)/r * a(r, theta).
ChannelVector channel(const ArrayConfig& cfg, const UserPosition& user,
                      ArvModel model = ArvModel::phase_only);

// Channels of all users stacked as columns (NM x K).
CMatrix channel_matrix(const ArrayConfig& cfg, std::span<const UserPosition> users,
                       ArvModel model = ArvModel::phase_only);

}  // namespace gmimo
