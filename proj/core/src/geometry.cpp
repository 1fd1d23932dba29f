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

#include "gmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>

#include "gmimo/errors.hpp"

namespace gmimo {

namespace {

// Index grids are {-(count-1)/2, ..., (count-1)/2}; accept a small tolerance so
// callers can pass values produced by module_index()/antenna_index().
bool on_index_grid(double index, int count) noexcept {
    const double slot = index + 0.5 * (count - 1);
    const double rounded = std::round(slot);
    return std::abs(slot - rounded) < 1e-9 && rounded >= 0.0 && rounded <= count - 1;
}

void check_indices(const ArrayConfig& cfg, double n, double m) {
    if (!on_index_grid(n, cfg.n_modules)) {
        throw std::out_of_range("module index " + std::to_string(n) + " outside the module grid");
    }
    if (!on_index_grid(m, cfg.antennas_per_module)) {
        throw std::out_of_range("antenna index " + std::to_string(m) + " outside the antenna grid");
    }
}

double distance_to_offset(const UserPosition& user, double offset) noexcept {
    const double r = user.r;
    return std::sqrt(r * r - 2.0 * r * offset * std::sin(user.theta) + offset * offset);
}

}  // namespace

void ArrayConfig::validate() const {
    if (n_modules < 1) throw ConfigError("array.n_modules", "must be a positive integer");
    if (antennas_per_module < 1) throw ConfigError("array.antennas_per_module", "must be a positive integer");
    if (!(carrier_frequency > 0.0) || !std::isfinite(carrier_frequency)) {
        throw ConfigError("array.carrier_frequency", "must be a positive frequency in Hz");
    }
    if (!(separation_factor >= 1.0) || !std::isfinite(separation_factor)) {
        throw ConfigError("array.separation_factor", "must be >= 1");
    }
    // Modules only overlap when there is more than one of them.
    if (n_modules > 1 && antennas_per_module > 1 && separation_factor < antennas_per_module) {
        throw ConfigError("array.separation_factor",
                          "must be >= antennas_per_module so that modules do not overlap");
    }
    if (element_spacing && !(*element_spacing > 0.0)) {
        throw ConfigError("array.element_spacing", "must be positive");
    }
    if (!(reference_gain > 0.0)) throw ConfigError("array.reference_gain", "must be positive");
}

namespace presets {

ArrayConfig modular() { return ArrayConfig{32, 4, 13.0, 15.0e9, std::nullopt, 1.0}; }
ArrayConfig sparse() { return ArrayConfig{128, 1, 3.19, 15.0e9, std::nullopt, 1.0}; }
ArrayConfig large_module() { return ArrayConfig{4, 32, 125.0, 15.0e9, std::nullopt, 1.0}; }
ArrayConfig collocated() { return ArrayConfig{1, 128, 1.0, 15.0e9, std::nullopt, 1.0}; }

std::vector<ArrayConfig> fixed_aperture_family() {
    constexpr int kModuleSizes[] = {1, 2, 4, 8, 16, 32, 64, 128};
    constexpr double kSeparations[] = {3.19, 6.42, 13.0, 26.6, 55.86, 125.0, 343.0, 1.0};
    std::vector<ArrayConfig> family;
    for (std::size_t i = 0; i < std::size(kModuleSizes); ++i) {
        ArrayConfig cfg;
        cfg.antennas_per_module = kModuleSizes[i];
        cfg.n_modules = 128 / kModuleSizes[i];
        cfg.separation_factor = kSeparations[i];
        family.push_back(cfg);
    }
    return family;
}

std::optional<ArrayConfig> by_name(std::string_view name) {
    if (name == "modular") return modular();
    if (name == "sparse") return sparse();
    if (name == "large-module") return large_module();
    if (name == "collocated") return collocated();
    return std::nullopt;
}

}  // namespace presets

double UserPosition::x() const noexcept { return r * std::cos(theta); }
double UserPosition::y() const noexcept { return r * std::sin(theta); }

UserPosition UserPosition::from_cartesian(double x, double y) noexcept {
    return UserPosition{std::hypot(x, y), std::atan2(y, x)};
}

std::string_view to_string(FieldRegion region) noexcept {
    switch (region) {
        case FieldRegion::module_near_field: return "module-near-field";
        case FieldRegion::modular_regime: return "modular-regime";
        case FieldRegion::array_far_field: return "array-far-field";
    }
    return "unknown";
}

Point2 element_position(const ArrayConfig& cfg, double n, double m) {
    check_indices(cfg, n, m);
    return Point2{0.0, (n * cfg.separation_factor + m) * cfg.spacing()};
}

double element_distance(const ArrayConfig& cfg, const UserPosition& user, double n, double m) {
    check_indices(cfg, n, m);
    return distance_to_offset(user, (n * cfg.separation_factor + m) * cfg.spacing());
}

double module_distance(const ArrayConfig& cfg, const UserPosition& user, double n) {
    check_indices(cfg, n, cfg.antenna_index(0));
    return distance_to_offset(user, n * cfg.separation_factor * cfg.spacing());
}

double module_angle(const ArrayConfig& cfg, const UserPosition& user, double n) {
    const double rn = module_distance(cfg, user, n);
    const double offset = n * cfg.separation_factor * cfg.spacing();
    double s = (user.r * std::sin(user.theta) - offset) / rn;
    if (std::abs(s) > 1.0 + 1e-12) {
        throw NumericalError("module_angle: arcsin argument " + std::to_string(s) + " outside [-1, 1]");
    }
    s = std::clamp(s, -1.0, 1.0);
    return std::asin(s);
}

Apertures apertures(const ArrayConfig& cfg) noexcept {
    const double d = cfg.spacing();
    Apertures a;
    a.module = (cfg.antennas_per_module - 1) * d;
    a.total = ((cfg.n_modules - 1) * cfg.separation_factor + (cfg.antennas_per_module - 1)) * d;
    a.rayleigh = 2.0 * a.total * a.total / cfg.wavelength();
    return a;
}

FieldRegion region_classify(const ArrayConfig& cfg, double r) noexcept {
    const Apertures a = apertures(cfg);
    const double lr = cfg.wavelength() * r;
    if (lr >= 2.0 * a.total * a.total) return FieldRegion::array_far_field;
    if (lr >= 2.0 * a.module * a.module) return FieldRegion::modular_regime;
    return FieldRegion::module_near_field;
}

// ---------------------------------------------------------------------------

void ScenarioConfig::validate() const {
    if (num_users < 1) throw ConfigError("scenario.num_users", "must be a positive integer");
    if (const auto* s = std::get_if<SectorRegion>(&region)) {
        if (!(s->r_min > 0.0)) throw ConfigError("scenario.r_min", "must be positive");
        if (!(s->r_max >= s->r_min)) throw ConfigError("scenario.r_max", "must be >= r_min");
        if (!(s->theta_max >= s->theta_min)) throw ConfigError("scenario.theta_max", "must be >= theta_min");
        if (s->theta_min < -kPi / 2.0 - 1e-12 || s->theta_max > kPi / 2.0 + 1e-12) {
            throw ConfigError("scenario.theta_min", "angles must lie in [-90, 90] degrees");
        }
    } else {
        const auto& rect = std::get<RectangleRegion>(region);
        if (!(rect.x_min > 0.0)) throw ConfigError("scenario.x_min", "must be positive (users in front of the array)");
        if (!(rect.x_max >= rect.x_min)) throw ConfigError("scenario.x_max", "must be >= x_min");
        if (!(rect.y_max >= rect.y_min)) throw ConfigError("scenario.y_max", "must be >= y_min");
    }
}

double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<UserPosition> sample_users(const ScenarioConfig& scenario, Rng& rng) {
    scenario.validate();
    std::vector<UserPosition> users;
    users.reserve(static_cast<std::size_t>(scenario.num_users));

    if (const auto* s = std::get_if<SectorRegion>(&scenario.region)) {
        const double r2_min = s->r_min * s->r_min;
        const double r2_span = s->r_max * s->r_max - r2_min;
        for (int k = 0; k < scenario.num_users; ++k) {
            const double u = uniform01(rng);
            const double v = uniform01(rng);
            const double r = scenario.sampling == Sampling::uniform_in_area
                                 ? std::sqrt(u * r2_span + r2_min)
                                 : s->r_min + u * (s->r_max - s->r_min);
            users.push_back({r, s->theta_min + v * (s->theta_max - s->theta_min)});
        }
    } else {
        const auto& rect = std::get<RectangleRegion>(scenario.region);
        for (int k = 0; k < scenario.num_users; ++k) {
            const double x = rect.x_min + uniform01(rng) * (rect.x_max - rect.x_min);
            const double y = rect.y_min + uniform01(rng) * (rect.y_max - rect.y_min);
            users.push_back(UserPosition::from_cartesian(x, y));
        }
    }
    return users;
}

}  // namespace gmimo
