// SPDX-License-Identifier: Apache-2.0
// Stochastic coordinate descent against the analytical latency/resource
// models, the hot loop of the pipeline's search phase.
#include <benchmark/benchmark.h>

#include "codesign/bundle.hpp"
#include "codesign/dnn.hpp"
#include "codesign/search.hpp"

using namespace codesign;

namespace {

void bm_scd_search(benchmark::State& state) {
    const Characterization ch(default_char_table(), TileShape{});
    const DeviceSpec device = pynq_z1();
    const auto bundles = enumerate_bundles(builtin_templates());
    const DnnModel initial =
        initialize_dnn(bundles[1], device, QuantScheme{}, {64, 64, 32}, ch);
    const AnalyticalOracle oracle(device, ch);
    SearchConfig cfg;
    cfg.lat_targ_ms = 50.0;
    cfg.epsilon_ms = 2.5;
    cfg.res_max = device.budget;
    cfg.k = static_cast<int>(state.range(0));
    cfg.seed = 11;
    for (auto _ : state) {
        benchmark::DoNotOptimize(scd_search(initial, cfg, oracle).models.size());
    }
}
BENCHMARK(bm_scd_search)->Arg(1)->Arg(3);

} // namespace
