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

// gmimo: command-line front end for the modular-array scheduling simulator.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gmimo/errors.hpp"
#include "gmimo/harness.hpp"
#include "gmimo/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

namespace fs = std::filesystem;

gmimo::ExperimentConfig load_or_default(const std::string& path) {
    return path.empty() ? gmimo::ExperimentConfig{} : gmimo::load_experiment(path);
}

void print_aggregates(const std::vector<gmimo::ResultRow>& rows) {
    std::cout << std::left << std::setw(8) << "sched" << std::right << std::setw(8) << "snr" << std::setw(12)
              << "sum_se" << std::setw(10) << "served" << std::setw(14) << "median_ms" << '\n';
    std::cout << std::fixed;
    for (const auto& a : gmimo::aggregate(rows)) {
        std::cout << std::left << std::setw(8) << a.scheduler << std::right << std::setprecision(1) << std::setw(8)
                  << a.snr_db << std::setprecision(3) << std::setw(12) << a.sum_se_mean << std::setprecision(2)
                  << std::setw(10) << a.served_mean << std::setprecision(3) << std::setw(14) << a.runtime_ms_median
                  << '\n';
    }
    std::cout.unsetf(std::ios::floatfield);
}

int cmd_simulate(const std::string& config, const std::optional<std::string>& out_dir,
                 const std::optional<std::uint64_t>& seed, unsigned threads) {
    auto cfg = load_or_default(config);
    if (seed) cfg.base_seed = *seed;
    if (out_dir) cfg.outputs.dir = *out_dir;

    gmimo::RunOptions options;
    options.threads = threads;
    const auto rows = gmimo::run_experiment(cfg, options);

    const fs::path results = cfg.outputs.dir / cfg.outputs.results;
    const fs::path aggregates = cfg.outputs.dir / cfg.outputs.aggregates;
    gmimo::emit_csv(rows, results);
    gmimo::emit_aggregates(rows, aggregates);
    print_aggregates(rows);
    std::cout << "wrote " << results.string() << " and " << aggregates.string() << '\n';
    return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& preset, std::vector<double> distances, double step,
              const std::string& out) {
    gmimo::ArrayConfig array = load_or_default(config).array;
    if (!preset.empty()) {
        const auto p = gmimo::presets::by_name(preset);
        if (!p) throw gmimo::ConfigError("preset", "unknown preset '" + preset + "'");
        array = *p;
    }
    gmimo::run_angle_sweep(array, distances, out, step);
    std::cout << "wrote " << out << '\n';
    return kExitOk;
}

int cmd_config_study(const std::string& config, double snr, int trials, const std::optional<std::uint64_t>& seed,
                     unsigned threads, const std::string& out) {
    auto cfg = load_or_default(config);
    if (seed) cfg.base_seed = *seed;
    gmimo::RunOptions options;
    options.threads = threads;
    const auto rows = gmimo::run_config_study(cfg, snr, trials, options);
    gmimo::emit_config_study(rows, out);
    std::cout << std::setw(6) << "N" << std::setw(6) << "M" << std::setw(9) << "S" << std::setw(12) << "sum_se"
              << std::setw(10) << "served" << '\n';
    std::cout << std::fixed;
    for (const auto& r : rows) {
        std::cout << std::setw(6) << r.array.n_modules << std::setw(6) << r.array.antennas_per_module
                  << std::setprecision(2) << std::setw(9) << r.array.separation_factor << std::setprecision(3)
                  << std::setw(12) << r.sum_se_mean << std::setprecision(2) << std::setw(10) << r.served_mean << '\n';
    }
    std::cout << "wrote " << out << '\n';
    return kExitOk;
}

int cmd_dump(const std::string& config, double snr, std::uint64_t seed, const std::string& scheduler,
             const std::string& out) {
    const auto cfg = load_or_default(config);
    const auto kind = gmimo::scheduler_from_string(scheduler);
    if (!kind) throw gmimo::ConfigError("scheduler", "unknown scheduler '" + scheduler + "'");
    gmimo::dump_selection(cfg, snr, seed, *kind, out);
    std::cout << "wrote " << out << '\n';
    return kExitOk;
}

int cmd_validate(std::uint64_t seed) {
    int failed = 0;
    for (const auto& check : gmimo::run_invariant_suite(seed)) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << "  (" << check.detail << ")\n";
        if (!check.passed) ++failed;
    }
    std::cout << (failed == 0 ? "all invariants hold\n" : std::to_string(failed) + " invariant(s) violated\n");
    return failed == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scheduling and interference simulator for modular massive-MIMO arrays"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gmimo 0.1.0");

    std::string config;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run over SNRs, trials and schedulers");
    simulate->add_option("--config", config, "experiment file (key = value)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", out_dir, "output directory (overrides output.dir)");
    simulate->add_option("--seed", seed, "base seed (overrides experiment.base_seed)");
    simulate->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));

    std::string preset;
    std::vector<double> distances{10.0, 30.0, 100.0};
    double step = 0.1;
    std::string sweep_out = "out/angle_sweep.csv";
    auto* sweep = app.add_subcommand("sweep-fig6", "IUI against angle at fixed distances, spherical and plane wave");
    sweep->add_option("--config", config, "take the array from this experiment file")->check(CLI::ExistingFile);
    sweep->add_option("--preset", preset, "array preset: modular, sparse, large-module, collocated");
    sweep->add_option("--distances", distances, "distances in metres")->delimiter(',');
    sweep->add_option("--step", step, "angle step in degrees");
    sweep->add_option("--out", sweep_out, "CSV path");

    double study_snr = 25.0;
    int study_trials = 50;
    std::string study_out = "out/config_study.csv";
    auto* study = app.add_subcommand("config-study", "SUS sum-SE across fixed-aperture configurations, NM = 128");
    study->add_option("--config", config, "scenario and scheduler settings")->check(CLI::ExistingFile);
    study->add_option("--snr", study_snr, "SNR in dB");
    study->add_option("--trials", study_trials, "trials per configuration")->check(CLI::PositiveNumber);
    study->add_option("--seed", seed, "base seed");
    study->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    study->add_option("--out", study_out, "CSV path");

    double dump_snr = 25.0;
    std::uint64_t dump_seed = 1;
    std::string dump_scheduler = "rss";
    std::string dump_out = "out/selection.csv";
    auto* dump = app.add_subcommand("dump-selection", "positions and selection flags of one trial");
    dump->add_option("--config", config, "experiment file")->check(CLI::ExistingFile);
    dump->add_option("--snr", dump_snr, "SNR in dB");
    dump->add_option("--seed", dump_seed, "trial seed (the seed column of a results CSV)");
    dump->add_option("--scheduler", dump_scheduler, "rss, fls, sus, greedy or dbs");
    dump->add_option("--out", dump_out, "CSV path");

    std::uint64_t validate_seed = 7;
    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    validate->add_option("--seed", validate_seed, "seed for the randomised checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(config, out_dir, seed, threads);
        if (*sweep) return cmd_sweep(config, preset, distances, step, sweep_out);
        if (*study) return cmd_config_study(config, study_snr, study_trials, seed, threads, study_out);
        if (*dump) return cmd_dump(config, dump_snr, dump_seed, dump_scheduler, dump_out);
        if (*validate) return cmd_validate(validate_seed);
    } catch (const gmimo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gmimo::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
