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

#include <benchmark/benchmark.h>

#include "gmimo/geometry.hpp"
#include "gmimo/precoding.hpp"

namespace {

gmimo::CMatrix random_channels(gmimo::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    gmimo::CMatrix h(rows, cols);
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        h.data()[i] = gmimo::Complex(gmimo::uniform01(rng) - 0.5, gmimo::uniform01(rng) - 0.5);
    }
    return h;
}

// One admission attempt (update + rollback) on a state holding range(0) users.
void BM_GramUpdate(benchmark::State& state) {
    const auto selected = static_cast<Eigen::Index>(state.range(0));
    const Eigen::Index nm = 128;
    gmimo::Rng rng(1);
    const gmimo::CMatrix h = random_channels(rng, nm, selected + 1);
    gmimo::GramInverse gram(nm);
    for (Eigen::Index k = 0; k < selected; ++k) gram.update(h.col(k), static_cast<int>(k));
    for (auto _ : state) {
        gram.update(h.col(selected), static_cast<int>(selected));
        gram.rollback();
    }
}
BENCHMARK(BM_GramUpdate)->RangeMultiplier(2)->Range(4, 64);

// Direct inversion of the same Gram matrix, for comparison.
void BM_GramDirect(benchmark::State& state) {
    const auto selected = static_cast<Eigen::Index>(state.range(0));
    gmimo::Rng rng(1);
    const gmimo::CMatrix h = random_channels(rng, 128, selected);
    for (auto _ : state) {
        gmimo::CMatrix g = (h.adjoint() * h).inverse();
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_GramDirect)->RangeMultiplier(2)->Range(4, 64);

void BM_Waterfilling(benchmark::State& state) {
    gmimo::Rng rng(2);
    std::vector<double> gains(static_cast<std::size_t>(state.range(0)));
    for (auto& g : gains) g = 0.01 + 100.0 * gmimo::uniform01(rng);
    for (auto _ : state) benchmark::DoNotOptimize(gmimo::waterfilling(gains, 10.0));
}
BENCHMARK(BM_Waterfilling)->Range(8, 128);

}  // namespace
BENCHMARK_MAIN();
