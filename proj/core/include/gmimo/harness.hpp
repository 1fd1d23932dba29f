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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmimo/channel.hpp"
#include "gmimo/config_file.hpp"
#include "gmimo/geometry.hpp"
#include "gmimo/schedulers.hpp"

namespace gmimo {

namespace scenarios {
ScenarioConfig near_sector();  // r in [10, 60] m, theta in +-60 deg
ScenarioConfig far_sector();   // r in [60, 150] m
ScenarioConfig far_sector_short();  // r in [60, 120] m
// "near", "far", "far-short"
std::optional<ScenarioConfig> by_name(std::string_view name);
}  // namespace scenarios

struct OutputPaths {
    std::filesystem::path dir = "out";
    std::string results = "results.csv";
    std::string aggregates = "aggregates.csv";
};

struct ExperimentConfig {
    ArrayConfig array = presets::modular();
    ScenarioConfig scenario = scenarios::near_sector();
    std::vector<double> snr_db{25.0};
    int trials = 1;
    std::vector<SchedulerKind> schedulers{std::begin(kAllSchedulers), std::end(kAllSchedulers)};
    SchedulerConfig scheduler_cfg;
    std::uint64_t base_seed = 1;
    ArvModel channel_model = ArvModel::phase_only;
    double noise_power = 1.0;
    OutputPaths outputs;

    void validate() const;
};

// Reads an experiment from the key/value format; see configs/ for examples.
// Unknown keys are rejected.
ExperimentConfig experiment_from_file(const ConfigFile& file);
ExperimentConfig load_experiment(const std::filesystem::path& path);

// Total transmit power for an SNR in dB referred to the 1 m gain.
double transmit_power(double snr_db, double noise_power, double reference_gain) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
// Distinct for distinct trials under a fixed base seed.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) noexcept;

struct ResultRow {
    std::string scheduler;
    double snr_db = 0.0;
    int trial = 0;
    double sum_se = 0.0;
    int served_users = 0;
    double runtime_ms = 0.0;
    std::uint64_t seed = 0;
};

struct TrialCell {
    SchedulerKind scheduler;
    double snr_db;
    int trial;
    std::uint64_t seed;
};

struct RunOptions {
    unsigned threads = 1;
    bool warmup = true;
    // Called once per cell, serialised across workers.
    std::function<void(const TrialCell&, const CMatrix& channels, const SchedulerOutcome&)> observer;
};

// Rows ordered by scheduler (config order), snr (config order), trial.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

struct CsvOptions {
    bool include_runtime = true;
};

void write_csv(std::ostream& out, std::span<const ResultRow> rows, const CsvOptions& options = {});
void emit_csv(std::span<const ResultRow> rows, const std::filesystem::path& path, const CsvOptions& options = {});

struct Aggregate {
    std::string scheduler;
    double snr_db = 0.0;
    std::size_t count = 0;
    double sum_se_mean = 0.0;
    double sum_se_std = 0.0;
    double served_mean = 0.0;
    double served_std = 0.0;
    double runtime_ms_mean = 0.0;
    double runtime_ms_std = 0.0;
    double runtime_ms_median = 0.0;
};

// Sample standard deviation; zero for a single trial.
std::vector<Aggregate> aggregate(std::span<const ResultRow> rows);

// Writes the aggregate CSV and a matplotlib script next to it (same stem, .py).
void emit_aggregates(std::span<const ResultRow> rows, const std::filesystem::path& path);

// One trial's users as x,y,selected.
void dump_selection(const ExperimentConfig& cfg, double snr_db, std::uint64_t seed, SchedulerKind scheduler,
                    const std::filesystem::path& path);

// Columns r_m,theta_deg,iui_sw,iui_pw over theta in [-90, 90] deg.
void run_angle_sweep(const ArrayConfig& cfg, std::span<const double> distances, const std::filesystem::path& path,
                    double theta_step_deg = 0.1);

struct ConfigStudyRow {
    ArrayConfig array;
    double aperture = 0.0;
    std::size_t trials = 0;
    double sum_se_mean = 0.0;
    double sum_se_std = 0.0;
    double served_mean = 0.0;
};

// SUS over the fixed-aperture family at one SNR; `base` supplies the scenario,
// seeds and scheduler settings.
std::vector<ConfigStudyRow> run_config_study(const ExperimentConfig& base, double snr_db, int trials,
                                             const RunOptions& options = {});
void emit_config_study(std::span<const ConfigStudyRow> rows, const std::filesystem::path& path);

}  // namespace gmimo
