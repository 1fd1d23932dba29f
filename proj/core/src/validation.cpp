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

#include "gmimo/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmimo/channel.hpp"
#include "gmimo/fresnel.hpp"
#include "gmimo/harness.hpp"
#include "gmimo/interference.hpp"
#include "gmimo/precoding.hpp"

namespace gmimo {

namespace {

std::string fmt(const char* label, double value) {
    std::ostringstream s;
    s.precision(3);
    s << label << '=' << std::scientific << value;
    return s.str();
}

ValidationCheck gram_inverse_check(Rng& rng) {
    double worst = 0.0;
    for (int run = 0; run < 10; ++run) {
        const Eigen::Index nm = 128;
        GramInverse state(nm);
        CMatrix h(nm, 32);
        for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
        for (Eigen::Index k = 0; k < h.cols(); ++k) {
            state.update(h.col(k), static_cast<int>(k));
            const CMatrix sel = state.channels();
            const CMatrix direct = (sel.adjoint() * sel).inverse();
            worst = std::max(worst, (state.inverse() - direct).norm() / direct.norm());
        }
    }
    return {"gram inverse matches direct inversion", worst <= 1e-8, fmt("max_rel_frobenius", worst)};
}

ValidationCheck waterfilling_check(Rng& rng) {
    double worst = 0.0;
    for (int run = 0; run < 200; ++run) {
        const auto k = 1 + static_cast<std::size_t>(uniform01(rng) * 20);
        std::vector<double> gains(k);
        for (auto& g : gains) g = std::pow(10.0, 4.0 * uniform01(rng) - 2.0);
        const double p_tx = std::pow(10.0, 3.0 * uniform01(rng) - 1.0);
        const auto wf = waterfilling(gains, p_tx);
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            total += wf.powers[i];
            if (wf.powers[i] > 0.0) {
                worst = std::max(worst, std::abs(wf.powers[i] + 1.0 / gains[i] - wf.water_level));
            } else {
                // Inactive users must sit on or above the water level.
                worst = std::max(worst, std::max(0.0, wf.water_level - 1.0 / gains[i]));
            }
        }
        worst = std::max(worst, std::abs(total - p_tx));
    }
    return {"waterfilling satisfies KKT", worst <= 1e-9, fmt("max_violation", worst)};
}

ValidationCheck far_field_check(Rng& rng) {
    const ArrayConfig cfg = presets::modular();
    double worst = 0.0;
    for (int run = 0; run < 200; ++run) {
        const UserPosition uj{100.0, (uniform01(rng) - 0.5) * kPi};
        const UserPosition uk{100.0, (uniform01(rng) - 0.5) * kPi};
        const double direct = iui_normalized(arv_farfield(cfg, uj), arv_farfield(cfg, uk));
        const double product = inter_module_ff_closed_form(cfg, uj.theta, uk.theta) *
                               intra_module_correlation(cfg, uj.theta, uk.theta);
        worst = std::max(worst, std::abs(direct - product));
    }
    return {"far-field IUI factorises", worst <= 1e-12, fmt("max_abs_error", worst)};
}

ValidationCheck fresnel_check() {
    const auto f0 = fresnel(0.0);
    const double f50 = std::abs(fresnel(50.0));
    const bool ok = f0 == Complex(0.0, 0.0) && std::abs(f50 - std::sqrt(0.5)) < 0.01 &&
                    std::abs(fresnel(-3.0) + fresnel(3.0)) < 1e-15;
    return {"fresnel integral limits", ok, fmt("abs_F50", f50)};
}

ValidationCheck aperture_check() {
    const double ref = apertures(presets::modular()).total;
    double worst = 0.0;
    for (const auto& cfg : {presets::sparse(), presets::large_module()}) {
        worst = std::max(worst, std::abs(apertures(cfg).total - ref) / ref);
    }
    return {"preset apertures agree", worst <= 5e-3, fmt("max_rel_difference", worst)};
}

ExperimentConfig small_experiment(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.scenario.num_users = 60;
    cfg.snr_db = {5.0, 25.0};
    cfg.trials = 3;
    cfg.base_seed = seed;
    return cfg;
}

ValidationCheck zf_check(std::uint64_t seed) {
    double leak = 0.0;
    double norm_err = 0.0;
    bool subset_ok = true;
    RunOptions options;
    options.warmup = false;
    options.observer = [&](const TrialCell&, const CMatrix& channels, const SchedulerOutcome& out) {
        const auto& res = out.result;
        for (std::size_t k = 0; k < res.selected.size(); ++k) {
            const auto p = res.precoders.col(static_cast<Eigen::Index>(k));
            norm_err = std::max(norm_err, std::abs(p.norm() - 1.0));
            for (std::size_t i = 0; i < res.selected.size(); ++i) {
                if (i == k) continue;
                const auto h = channels.col(res.selected[i]);
                leak = std::max(leak, std::abs(h.dot(p)) / h.norm());
            }
        }
        auto sorted = res.selected;
        std::sort(sorted.begin(), sorted.end());
        subset_ok = subset_ok && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() &&
                    (sorted.empty() || (sorted.front() >= 0 && sorted.back() < channels.cols())) &&
                    res.sum_se >= 0.0;
    };
    run_experiment(small_experiment(seed), options);
    const bool ok = subset_ok && leak <= 1e-9 && norm_err <= 1e-10;
    return {"ZF orthogonality and unit-norm precoders", ok, fmt("max_leakage", leak) + " " + fmt("max_norm_error", norm_err)};
}

ValidationCheck determinism_check(std::uint64_t seed) {
    RunOptions options;
    options.warmup = false;
    const auto cfg = small_experiment(seed);
    std::ostringstream a, b;
    write_csv(a, run_experiment(cfg, options), CsvOptions{false});
    options.threads = 2;
    write_csv(b, run_experiment(cfg, options), CsvOptions{false});
    return {"replay determinism", a.str() == b.str(), a.str() == b.str() ? "identical" : "outputs differ"};
}

}  // namespace

std::vector<ValidationCheck> run_invariant_suite(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ValidationCheck> checks;
    checks.push_back(aperture_check());
    checks.push_back(fresnel_check());
    checks.push_back(gram_inverse_check(rng));
    checks.push_back(waterfilling_check(rng));
    checks.push_back(far_field_check(rng));
    checks.push_back(zf_check(seed));
    checks.push_back(determinism_check(seed));
    return checks;
}

}  // namespace gmimo
