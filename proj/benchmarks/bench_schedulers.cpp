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

#include "gmimo/harness.hpp"
#include "gmimo/schedulers.hpp"

namespace {

struct Pool {
    std::vector<gmimo::UserPosition> users;
    gmimo::CMatrix channels;
};

Pool make_pool(int k) {
    auto scenario = gmimo::scenarios::near_sector();
    scenario.num_users = k;
    gmimo::Rng rng(7);
    Pool pool;
    pool.users = gmimo::sample_users(scenario, rng);
    pool.channels = gmimo::channel_matrix(gmimo::presets::modular(), pool.users);
    return pool;
}

void BM_Scheduler(benchmark::State& state, gmimo::SchedulerKind kind) {
    const Pool pool = make_pool(static_cast<int>(state.range(0)));
    const gmimo::SchedulerConfig cfg;
    const double p_tx = gmimo::transmit_power(15.0, 1.0, 1.0);
    for (auto _ : state) {
        auto out = gmimo::run_scheduler(kind, pool.users, pool.channels, cfg, 3, p_tx, 1.0);
        benchmark::DoNotOptimize(out.result.sum_se);
    }
}

BENCHMARK_CAPTURE(BM_Scheduler, rss, gmimo::SchedulerKind::rss)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scheduler, fls, gmimo::SchedulerKind::fls)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scheduler, sus, gmimo::SchedulerKind::sus)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scheduler, greedy, gmimo::SchedulerKind::greedy)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scheduler, dbs, gmimo::SchedulerKind::dbs)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ChannelMatrix(benchmark::State& state) {
    const auto cfg = gmimo::presets::modular();
    auto scenario = gmimo::scenarios::near_sector();
    scenario.num_users = static_cast<int>(state.range(0));
    gmimo::Rng rng(8);
    const auto users = gmimo::sample_users(scenario, rng);
    for (auto _ : state) benchmark::DoNotOptimize(gmimo::channel_matrix(cfg, users).data());
}
BENCHMARK(BM_ChannelMatrix)->Arg(300);

}  // namespace
