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

#include "gmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "gmimo/csv.hpp"
#include "gmimo/errors.hpp"
#include "gmimo/interference.hpp"

namespace gmimo {

namespace scenarios {

ScenarioConfig near_sector() { return ScenarioConfig{}; }

ScenarioConfig far_sector() {
    ScenarioConfig s;
    s.region = SectorRegion{60.0, 150.0, -kPi / 3.0, kPi / 3.0};
    return s;
}

ScenarioConfig far_sector_short() {
    ScenarioConfig s;
    s.region = SectorRegion{60.0, 120.0, -kPi / 3.0, kPi / 3.0};
    return s;
}

std::optional<ScenarioConfig> by_name(std::string_view name) {
    if (name == "near") return near_sector();
    if (name == "far") return far_sector();
    if (name == "far-short") return far_sector_short();
    return std::nullopt;
}

}  // namespace scenarios

void ExperimentConfig::validate() const {
    array.validate();
    scenario.validate();
    scheduler_cfg.validate();
    if (snr_db.empty()) throw ConfigError("experiment.snr_db", "needs at least one value");
    for (const double s : snr_db) {
        if (!std::isfinite(s)) throw ConfigError("experiment.snr_db", "values must be finite");
    }
    if (trials < 1) throw ConfigError("experiment.trials", "must be at least 1");
    if (schedulers.empty()) throw ConfigError("experiment.schedulers", "needs at least one scheduler");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
        throw ConfigError("experiment.noise_power", "must be positive");
    }
}

namespace {

constexpr double kDeg = kPi / 180.0;

template <typename T, typename U>
void assign(T& target, const std::optional<U>& value) {
    if (value) target = static_cast<T>(*value);
}

int checked_int(const ConfigFile& file, const std::string& key, int fallback) {
    const auto v = file.get_int(key);
    if (!v) return fallback;
    if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
        throw ConfigError(key, "out of range");
    }
    return static_cast<int>(*v);
}

void read_array(const ConfigFile& file, ArrayConfig& array) {
    if (const auto name = file.get_string("array.preset")) {
        const auto preset = presets::by_name(*name);
        if (!preset) throw ConfigError("array.preset", "unknown preset '" + *name + "'");
        array = *preset;
    }
    array.n_modules = checked_int(file, "array.n_modules", array.n_modules);
    array.antennas_per_module = checked_int(file, "array.antennas_per_module", array.antennas_per_module);
    assign(array.separation_factor, file.get_double("array.separation_factor"));
    assign(array.carrier_frequency, file.get_double("array.carrier_frequency"));
    assign(array.reference_gain, file.get_double("array.reference_gain"));
    if (const auto d = file.get_double("array.element_spacing")) array.element_spacing = *d;
}

void read_scenario(const ConfigFile& file, ScenarioConfig& scenario) {
    if (const auto name = file.get_string("scenario.preset")) {
        const auto preset = scenarios::by_name(*name);
        if (!preset) throw ConfigError("scenario.preset", "unknown preset '" + *name + "'");
        scenario = *preset;
    }
    if (const auto region = file.get_string("scenario.region")) {
        if (*region == "sector") {
            if (!std::holds_alternative<SectorRegion>(scenario.region)) scenario.region = SectorRegion{};
        } else if (*region == "rectangle") {
            if (!std::holds_alternative<RectangleRegion>(scenario.region)) scenario.region = RectangleRegion{};
        } else {
            throw ConfigError("scenario.region", "expected sector or rectangle");
        }
    }
    const bool sector = std::holds_alternative<SectorRegion>(scenario.region);
    for (const char* key : {"scenario.r_min", "scenario.r_max", "scenario.theta_min_deg", "scenario.theta_max_deg"}) {
        if (!sector && file.contains(key)) throw ConfigError(key, "only valid for a sector region");
    }
    for (const char* key : {"scenario.x_min", "scenario.x_max", "scenario.y_min", "scenario.y_max"}) {
        if (sector && file.contains(key)) throw ConfigError(key, "only valid for a rectangle region");
    }
    if (auto* s = std::get_if<SectorRegion>(&scenario.region)) {
        assign(s->r_min, file.get_double("scenario.r_min"));
        assign(s->r_max, file.get_double("scenario.r_max"));
        if (const auto t = file.get_double("scenario.theta_min_deg")) s->theta_min = *t * kDeg;
        if (const auto t = file.get_double("scenario.theta_max_deg")) s->theta_max = *t * kDeg;
    } else {
        auto& r = std::get<RectangleRegion>(scenario.region);
        assign(r.x_min, file.get_double("scenario.x_min"));
        assign(r.x_max, file.get_double("scenario.x_max"));
        assign(r.y_min, file.get_double("scenario.y_min"));
        assign(r.y_max, file.get_double("scenario.y_max"));
    }
    scenario.num_users = checked_int(file, "scenario.num_users", scenario.num_users);
    if (const auto s = file.get_string("scenario.sampling")) {
        if (*s == "uniform-in-area") {
            scenario.sampling = Sampling::uniform_in_area;
        } else if (*s == "uniform-in-polar") {
            scenario.sampling = Sampling::uniform_in_polar;
        } else {
            throw ConfigError("scenario.sampling", "expected uniform-in-area or uniform-in-polar");
        }
    }
}

void read_scheduler(const ConfigFile& file, SchedulerConfig& cfg) {
    assign(cfg.mu, file.get_double("scheduler.mu"));
    assign(cfg.l_init, file.get_double("scheduler.l_init"));
    assign(cfg.l_step, file.get_double("scheduler.l_step"));
    if (const auto v = file.get_string("scheduler.gamma_variant")) {
        if (*v == "residual-fraction") {
            cfg.gamma_variant = GammaVariant::residual_fraction;
        } else if (*v == "as-written") {
            cfg.gamma_variant = GammaVariant::as_written;
        } else {
            throw ConfigError("scheduler.gamma_variant", "expected residual-fraction or as-written");
        }
    }
    if (const auto v = file.get_string("scheduler.stopping")) {
        if (*v == "sum-se-decrease") {
            cfg.stopping = StoppingRule::sum_se_decrease;
        } else if (*v == "exhaustion") {
            cfg.stopping = StoppingRule::exhaustion;
        } else {
            throw ConfigError("scheduler.stopping", "expected sum-se-decrease or exhaustion");
        }
    }
    if (const auto a = file.get_double("scheduler.sus_alpha")) cfg.sus_alpha = *a;
}

void read_experiment(const ConfigFile& file, ExperimentConfig& cfg) {
    assign(cfg.snr_db, file.get_double_list("experiment.snr_db"));
    cfg.trials = checked_int(file, "experiment.trials", cfg.trials);
    if (const auto names = file.get_string_list("experiment.schedulers")) {
        cfg.schedulers.clear();
        for (const auto& name : *names) {
            const auto kind = scheduler_from_string(name);
            if (!kind) throw ConfigError("experiment.schedulers", "unknown scheduler '" + name + "'");
            if (std::find(cfg.schedulers.begin(), cfg.schedulers.end(), *kind) != cfg.schedulers.end()) {
                throw ConfigError("experiment.schedulers", "'" + name + "' listed twice");
            }
            cfg.schedulers.push_back(*kind);
        }
    }
    assign(cfg.base_seed, file.get_uint("experiment.base_seed"));
    assign(cfg.noise_power, file.get_double("experiment.noise_power"));
    if (const auto m = file.get_string("experiment.channel_model")) {
        if (*m == "phase-only") {
            cfg.channel_model = ArvModel::phase_only;
        } else if (*m == "exact") {
            cfg.channel_model = ArvModel::exact;
        } else {
            throw ConfigError("experiment.channel_model", "expected phase-only or exact");
        }
    }
    if (const auto d = file.get_string("output.dir")) cfg.outputs.dir = *d;
    assign(cfg.outputs.results, file.get_string("output.results"));
    assign(cfg.outputs.aggregates, file.get_string("output.aggregates"));
}

}  // namespace

ExperimentConfig experiment_from_file(const ConfigFile& file) {
    ExperimentConfig cfg;
    read_array(file, cfg.array);
    read_scenario(file, cfg.scenario);
    read_scheduler(file, cfg.scheduler_cfg);
    read_experiment(file, cfg);
    if (const auto unused = file.unused_keys(); !unused.empty()) {
        throw ConfigError(unused.front(), "unknown key");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    return experiment_from_file(ConfigFile::load(path));
}

double transmit_power(double snr_db, double noise_power, double reference_gain) noexcept {
    return std::pow(10.0, snr_db / 10.0) * noise_power / reference_gain;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) noexcept {
    return base_seed ^ splitmix64(trial);
}

namespace {

struct TrialData {
    std::vector<UserPosition> users;
    CMatrix channels;
};

TrialData make_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    TrialData data;
    data.users = sample_users(cfg.scenario, rng);
    data.channels = channel_matrix(cfg.array, data.users, cfg.channel_model);
    return data;
}

SchedulerOutcome run_cell(const ExperimentConfig& cfg, const TrialData& data, SchedulerKind kind, double snr_db,
                          std::uint64_t seed) {
    const double p_tx = transmit_power(snr_db, cfg.noise_power, cfg.array.reference_gain);
    // The greedy permutation draws from its own stream so it never correlates
    // with the user positions.
    return run_scheduler(kind, data.users, data.channels, cfg.scheduler_cfg, splitmix64(seed + 1), p_tx,
                         cfg.noise_power);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const std::size_t n_sched = cfg.schedulers.size();
    const std::size_t n_snr = cfg.snr_db.size();
    const auto n_trials = static_cast<std::size_t>(cfg.trials);

    if (options.warmup) {
        const auto data = make_trial(cfg, trial_seed(cfg.base_seed, 0));
        for (const auto kind : cfg.schedulers) run_cell(cfg, data, kind, cfg.snr_db.front(), cfg.base_seed);
    }

    std::vector<ResultRow> rows(n_sched * n_snr * n_trials);
    std::atomic<std::size_t> next{0};
    std::mutex observer_mutex;
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= n_trials) return;
            {
                std::lock_guard lock(error_mutex);
                if (error) return;
            }
            try {
                const std::uint64_t seed = trial_seed(cfg.base_seed, t);
                const auto data = make_trial(cfg, seed);
                for (std::size_t si = 0; si < n_sched; ++si) {
                    for (std::size_t ni = 0; ni < n_snr; ++ni) {
                        const auto kind = cfg.schedulers[si];
                        const double snr = cfg.snr_db[ni];
                        const auto outcome = run_cell(cfg, data, kind, snr, seed);
                        auto& row = rows[(si * n_snr + ni) * n_trials + t];
                        row.scheduler = std::string(to_string(kind));
                        row.snr_db = snr;
                        row.trial = static_cast<int>(t);
                        row.sum_se = outcome.result.sum_se;
                        row.served_users = static_cast<int>(outcome.result.selected.size());
                        row.runtime_ms = outcome.runtime_s * 1e3;
                        row.seed = seed;
                        if (options.observer) {
                            std::lock_guard lock(observer_mutex);
                            options.observer(TrialCell{kind, snr, static_cast<int>(t), seed}, data.channels, outcome);
                        }
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_trials)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return rows;
}

void write_csv(std::ostream& out, std::span<const ResultRow> rows, const CsvOptions& options) {
    out << "scheduler,snr_db,trial,sum_se,served_users" << (options.include_runtime ? ",runtime_ms" : "")
        << ",seed\n";
    for (const auto& row : rows) {
        out << row.scheduler << ',' << csv::number(row.snr_db) << ',' << row.trial << ','
            << csv::number(row.sum_se) << ',' << row.served_users;
        if (options.include_runtime) out << ',' << csv::number(row.runtime_ms);
        out << ',' << row.seed << '\n';
    }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double acc = 0.0;
        for (const double x : v) acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(v.size() - 1));
    }
    return s;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

constexpr const char* kPlotScript = R"(#!/usr/bin/env python3
# Sum-SE and served users against SNR, one curve per scheduler.
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "@AGG@"
curves = defaultdict(list)
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        curves[row["scheduler"]].append(
            (float(row["snr_db"]), float(row["sum_se_mean"]), float(row["served_mean"])))

fig, (ax_se, ax_users) = plt.subplots(1, 2, figsize=(10, 4))
for name, points in sorted(curves.items()):
    points.sort()
    snr = [p[0] for p in points]
    ax_se.plot(snr, [p[1] for p in points], marker="o", label=name.upper())
    ax_users.plot(snr, [p[2] for p in points], marker="o", label=name.upper())
ax_se.set_xlabel("SNR [dB]")
ax_se.set_ylabel("Sum-SE [bit/s/Hz]")
ax_users.set_xlabel("SNR [dB]")
ax_users.set_ylabel("Served users")
for ax in (ax_se, ax_users):
    ax.grid(True)
    ax.legend()
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
)";

}  // namespace

void emit_csv(std::span<const ResultRow> rows, const std::filesystem::path& path, const CsvOptions& options) {
    auto out = open_output(path);
    write_csv(out, rows, options);
    close_output(out, path);
}

std::vector<Aggregate> aggregate(std::span<const ResultRow> rows) {
    // Keep first-seen order of (scheduler, snr).
    std::vector<std::pair<std::string, double>> keys;
    std::map<std::pair<std::string, double>, std::vector<const ResultRow*>> groups;
    for (const auto& row : rows) {
        auto key = std::make_pair(row.scheduler, row.snr_db);
        auto& group = groups[key];
        if (group.empty()) keys.push_back(key);
        group.push_back(&row);
    }
    std::vector<Aggregate> out;
    out.reserve(keys.size());
    for (const auto& key : keys) {
        const auto& group = groups[key];
        std::vector<double> se, served, runtime;
        for (const auto* r : group) {
            se.push_back(r->sum_se);
            served.push_back(r->served_users);
            runtime.push_back(r->runtime_ms);
        }
        Aggregate a;
        a.scheduler = key.first;
        a.snr_db = key.second;
        a.count = group.size();
        const auto s1 = stats(se);
        const auto s2 = stats(served);
        const auto s3 = stats(runtime);
        a.sum_se_mean = s1.mean;
        a.sum_se_std = s1.stddev;
        a.served_mean = s2.mean;
        a.served_std = s2.stddev;
        a.runtime_ms_mean = s3.mean;
        a.runtime_ms_std = s3.stddev;
        a.runtime_ms_median = median(runtime);
        out.push_back(a);
    }
    return out;
}

void emit_aggregates(std::span<const ResultRow> rows, const std::filesystem::path& path) {
    const auto aggs = aggregate(rows);
    {
        auto out = open_output(path);
        out << "scheduler,snr_db,trials,sum_se_mean,sum_se_std,served_mean,served_std,"
               "runtime_ms_mean,runtime_ms_std,runtime_ms_median\n";
        for (const auto& a : aggs) {
            out << a.scheduler << ',' << csv::number(a.snr_db) << ',' << a.count << ',' << csv::number(a.sum_se_mean)
                << ',' << csv::number(a.sum_se_std) << ',' << csv::number(a.served_mean) << ','
                << csv::number(a.served_std) << ',' << csv::number(a.runtime_ms_mean) << ','
                << csv::number(a.runtime_ms_std) << ',' << csv::number(a.runtime_ms_median) << '\n';
        }
        close_output(out, path);
    }
    auto script_path = path;
    script_path.replace_extension(".py");
    std::string script = kPlotScript;
    script.replace(script.find("@AGG@"), 5, path.filename().string());
    auto out = open_output(script_path);
    out << script;
    close_output(out, script_path);
}

void dump_selection(const ExperimentConfig& cfg, double snr_db, std::uint64_t seed, SchedulerKind scheduler,
                    const std::filesystem::path& path) {
    cfg.validate();
    const auto data = make_trial(cfg, seed);
    const auto outcome = run_cell(cfg, data, scheduler, snr_db, seed);
    std::vector<char> selected(data.users.size(), 0);
    for (const int k : outcome.result.selected) selected[static_cast<std::size_t>(k)] = 1;

    auto out = open_output(path);
    out << "x,y,selected\n";
    for (std::size_t i = 0; i < data.users.size(); ++i) {
        out << csv::number(data.users[i].x()) << ',' << csv::number(data.users[i].y()) << ','
            << static_cast<int>(selected[i]) << '\n';
    }
    close_output(out, path);
}

void run_angle_sweep(const ArrayConfig& cfg, std::span<const double> distances, const std::filesystem::path& path,
                    double theta_step_deg) {
    cfg.validate();
    if (distances.empty()) throw ConfigError("distances", "needs at least one distance");
    for (const double r : distances) {
        if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("distances", "must be positive");
    }
    if (!(theta_step_deg > 0.0) || theta_step_deg > 180.0) throw ConfigError("theta_step", "must lie in (0, 180]");

    const auto steps = static_cast<std::size_t>(std::floor(180.0 / theta_step_deg + 1e-9));
    std::vector<double> grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) grid[i] = (-90.0 + static_cast<double>(i) * theta_step_deg) * kDeg;

    auto out = open_output(path);
    out << "r_m,theta_deg,iui_sw,iui_pw\n";
    for (const double r : distances) {
        for (const auto& p : interference_sweep(cfg, r, grid, true)) {
            out << csv::number(r) << ',' << csv::number(p.theta / kDeg) << ',' << csv::number(p.iui_sw) << ','
                << csv::number(p.iui_pw) << '\n';
        }
    }
    close_output(out, path);
}

std::vector<ConfigStudyRow> run_config_study(const ExperimentConfig& base, double snr_db, int trials,
                                             const RunOptions& options) {
    std::vector<ConfigStudyRow> out;
    for (const auto& array : presets::fixed_aperture_family()) {
        ExperimentConfig cfg = base;
        cfg.array = array;
        cfg.snr_db = {snr_db};
        cfg.trials = trials;
        cfg.schedulers = {SchedulerKind::sus};
        const auto rows = run_experiment(cfg, options);
        const auto agg = aggregate(rows).front();
        ConfigStudyRow row;
        row.array = array;
        row.aperture = apertures(array).total;
        row.trials = agg.count;
        row.sum_se_mean = agg.sum_se_mean;
        row.sum_se_std = agg.sum_se_std;
        row.served_mean = agg.served_mean;
        out.push_back(row);
    }
    return out;
}

void emit_config_study(std::span<const ConfigStudyRow> rows, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "n_modules,antennas_per_module,separation_factor,aperture_m,trials,sum_se_mean,sum_se_std,served_mean\n";
    for (const auto& r : rows) {
        out << r.array.n_modules << ',' << r.array.antennas_per_module << ','
            << csv::number(r.array.separation_factor) << ',' << csv::number(r.aperture) << ',' << r.trials << ','
            << csv::number(r.sum_se_mean) << ',' << csv::number(r.sum_se_std) << ',' << csv::number(r.served_mean)
            << '\n';
    }
    close_output(out, path);
}

}  // namespace gmimo
