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
#include <random>
#include <string_view>
#include <variant>
#include <vector>

namespace gmimo {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact SI value
inline constexpr double kPi = 3.14159265358979323846;

// Modular uniform linear array placed along the y-axis, symmetric about the
// origin. N modules of M elements; element (n, m) sits at (0, (nS + m)d).
//
// Module and antenna indices live on unit-step grids centred on zero:
// {-(N-1)/2, ..., (N-1)/2}. For even counts they are half-integers, which keeps
// the aperture formula [(N-1)S + (M-1)]d valid for every count.
struct ArrayConfig {
    int n_modules = 32;
    int antennas_per_module = 4;
    double separation_factor = 13.0;     // S, in multiples of d
    double carrier_frequency = 15.0e9;   // Hz
    std::optional<double> element_spacing = std::nullopt;  // d in metres; lambda/2 when unset
    double reference_gain = 1.0;         // beta_0, linear

    double wavelength() const noexcept { return kSpeedOfLight / carrier_frequency; }
    double spacing() const noexcept { return element_spacing.value_or(0.5 * wavelength()); }
    std::size_t num_elements() const noexcept {
        return static_cast<std::size_t>(n_modules) * static_cast<std::size_t>(antennas_per_module);
    }

    // Index value of the slot-th module / antenna (slot counts from zero).
    double module_index(int slot) const noexcept { return slot - 0.5 * (n_modules - 1); }
    double antenna_index(int slot) const noexcept { return slot - 0.5 * (antennas_per_module - 1); }

    // Throws ConfigError naming the offending field.
    void validate() const;
};

namespace presets {
ArrayConfig modular();       // N=32, M=4, S=13
ArrayConfig sparse();        // N=128, M=1, S=3.19
ArrayConfig large_module();  // N=4, M=32, S=125
ArrayConfig collocated();    // N=1, M=128, S=1

// Fixed-aperture family with NM = 128 used by the configuration study.
std::vector<ArrayConfig> fixed_aperture_family();

// Looks a preset up by name ("modular", "sparse", "large-module", "collocated").
std::optional<ArrayConfig> by_name(std::string_view name);
}  // namespace presets

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Polar user location: r from the array centre, theta from the +x axis.
struct UserPosition {
    double r = 1.0;
    double theta = 0.0;

    double x() const noexcept;
    double y() const noexcept;
    static UserPosition from_cartesian(double x, double y) noexcept;
};

struct Apertures {
    double module = 0.0;    // (M-1)d
    double total = 0.0;     // [(N-1)S + (M-1)]d
    double rayleigh = 0.0;  // 2 total^2 / lambda
};

enum class FieldRegion { module_near_field, modular_regime, array_far_field };

std::string_view to_string(FieldRegion region) noexcept;

// Throws std::out_of_range when n or m is not on the index grid.
Point2 element_position(const ArrayConfig& cfg, double n, double m);
double element_distance(const ArrayConfig& cfg, const UserPosition& user, double n, double m);
double module_distance(const ArrayConfig& cfg, const UserPosition& user, double n);

// Angle between the user and the centre of module n. Throws NumericalError
// when the arcsin argument leaves [-1, 1] by more than 1e-12.
double module_angle(const ArrayConfig& cfg, const UserPosition& user, double n);

Apertures apertures(const ArrayConfig& cfg) noexcept;
FieldRegion region_classify(const ArrayConfig& cfg, double r) noexcept;

// ---------------------------------------------------------------------------
// Scenario sampling

struct SectorRegion {
    double r_min = 10.0;
    double r_max = 60.0;
    double theta_min = -kPi / 3.0;
    double theta_max = kPi / 3.0;
};

struct RectangleRegion {
    double x_min = 10.0;
    double x_max = 60.0;
    double y_min = -60.0;
    double y_max = 60.0;
};

enum class Sampling { uniform_in_area, uniform_in_polar };

struct ScenarioConfig {
    std::variant<SectorRegion, RectangleRegion> region = SectorRegion{};
    int num_users = 300;
    Sampling sampling = Sampling::uniform_in_area;
    std::uint64_t seed = 0;

    void validate() const;
};

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
double uniform01(Rng& rng) noexcept;

std::vector<UserPosition> sample_users(const ScenarioConfig& scenario, Rng& rng);

}  // namespace gmimo
