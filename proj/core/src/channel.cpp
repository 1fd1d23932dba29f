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

#include "gmimo/channel.hpp"

#include <algorithm>
#include <cmath>

namespace gmimo {

namespace {

Complex phasor(double phase) noexcept { return {std::cos(phase), std::sin(phase)}; }

template <typename Entry>
Arv fill_elements(const ArrayConfig& cfg, Entry&& entry) {
    const int n_count = cfg.n_modules;
    const int m_count = cfg.antennas_per_module;
    Arv a(static_cast<Eigen::Index>(cfg.num_elements()));
    for (int sn = 0; sn < n_count; ++sn) {
        const double n = cfg.module_index(sn);
        for (int sm = 0; sm < m_count; ++sm) {
            a(sn * m_count + sm) = entry(n, cfg.antenna_index(sm));
        }
    }
    return a;
}

double offset_distance(const UserPosition& user, double sin_theta, double offset) noexcept {
    return std::sqrt(user.r * user.r - 2.0 * user.r * offset * sin_theta + offset * offset);
}

}  // namespace

Arv arv_exact(const ArrayConfig& cfg, const UserPosition& user) {
    const double k = 2.0 * kPi / cfg.wavelength();
    const double d = cfg.spacing();
    const double s = std::sin(user.theta);
    return fill_elements(cfg, [&](double n, double m) {
        const double rnm = offset_distance(user, s, (n * cfg.separation_factor + m) * d);
        return (user.r / rnm) * phasor(-k * rnm);
    });
}

Arv arv_phase_only(const ArrayConfig& cfg, const UserPosition& user) {
    const double k = 2.0 * kPi / cfg.wavelength();
    const double d = cfg.spacing();
    const double s = std::sin(user.theta);
    return fill_elements(cfg, [&](double n, double m) {
        return phasor(-k * offset_distance(user, s, (n * cfg.separation_factor + m) * d));
    });
}

CVector q_nearfield(const ArrayConfig& cfg, const UserPosition& user) {
    const double k = 2.0 * kPi / cfg.wavelength();
    const double sd = cfg.separation_factor * cfg.spacing();
    const double s = std::sin(user.theta);
    CVector q(cfg.n_modules);
    for (int sn = 0; sn < cfg.n_modules; ++sn) {
        q(sn) = phasor(-k * offset_distance(user, s, cfg.module_index(sn) * sd));
    }
    return q;
}

CVector q_farfield(const ArrayConfig& cfg, const UserPosition& user) {
    const double k = 2.0 * kPi / cfg.wavelength();
    const double sd = cfg.separation_factor * cfg.spacing();
    const double s = std::sin(user.theta);
    const Complex common = phasor(-k * user.r);
    CVector q(cfg.n_modules);
    for (int sn = 0; sn < cfg.n_modules; ++sn) {
        q(sn) = common * phasor(k * cfg.module_index(sn) * sd * s);
    }
    return q;
}

CVector b_steering(const ArrayConfig& cfg, double angle) {
    const double kd = 2.0 * kPi * cfg.spacing() / cfg.wavelength();
    const double s = std::sin(angle);
    CVector b(cfg.antennas_per_module);
    for (int sm = 0; sm < cfg.antennas_per_module; ++sm) {
        b(sm) = phasor(kd * cfg.antenna_index(sm) * s);
    }
    return b;
}

Arv arv_modular(const ArrayConfig& cfg, const UserPosition& user) {
    const double k = 2.0 * kPi / cfg.wavelength();
    const double d = cfg.spacing();
    const double sd = cfg.separation_factor * d;
    const double s = std::sin(user.theta);
    const int m_count = cfg.antennas_per_module;
    Arv a(static_cast<Eigen::Index>(cfg.num_elements()));
    for (int sn = 0; sn < cfg.n_modules; ++sn) {
        const double offset = cfg.module_index(sn) * sd;
        const double rn = offset_distance(user, s, offset);
        // sin(theta_n) directly; the arcsin/sin round trip adds nothing.
        const double sin_n = std::clamp((user.r * s - offset) / rn, -1.0, 1.0);
        const Complex qn = phasor(-k * rn);
        for (int sm = 0; sm < m_count; ++sm) {
            a(sn * m_count + sm) = qn * phasor(k * cfg.antenna_index(sm) * d * sin_n);
        }
    }
    return a;
}

Arv arv_farfield(const ArrayConfig& cfg, const UserPosition& user) {
    const CVector q = q_farfield(cfg, user);
    const CVector b = b_steering(cfg, user.theta);
    const int m_count = cfg.antennas_per_module;
    Arv a(static_cast<Eigen::Index>(cfg.num_elements()));
    for (int sn = 0; sn < cfg.n_modules; ++sn) {
        a.segment(sn * m_count, m_count) = q(sn) * b;
    }
    return a;
}

ChannelVector channel(const ArrayConfig& cfg, const UserPosition& user, ArvModel model) {
    const double scale = std::sqrt(cfg.reference_gain) / user.r;
    Arv a = model == ArvModel::exact ? arv_exact(cfg, user) : arv_phase_only(cfg, user);
    return ChannelVector{scale * a, user};
}

CMatrix channel_matrix(const ArrayConfig& cfg, std::span<const UserPosition> users, ArvModel model) {
    CMatrix h(static_cast<Eigen::Index>(cfg.num_elements()), static_cast<Eigen::Index>(users.size()));
    for (std::size_t k = 0; k < users.size(); ++k) {
        h.col(static_cast<Eigen::Index>(k)) = channel(cfg, users[k], model).values;
    }
    return h;
}

}  // namespace gmimo
