// SPDX-License-Identifier: Apache-2.0
// Tile-pipeline simulator throughput on a two-conv bundle and a whole model.
#include <benchmark/benchmark.h>

#include <vector>

#include "codesign/bundle.hpp"
#include "codesign/characterization.hpp"
#include "codesign/dnn.hpp"
#include "codesign/eval.hpp"
#include "codesign/sim.hpp"

using namespace codesign;

namespace {

const Characterization& ch() {
    static const Characterization c(default_char_table(), TileShape{});
    return c;
}

Bundle two_conv_bundle(int pf) {
    const auto bundles = enumerate_bundles(builtin_templates());
    return with_config(bundles[11], pf, QuantScheme{}); // conv3x3 + dwconv5x5 tail
}

void bm_simulate_bundle(benchmark::State& state) {
    const Bundle b = two_conv_bundle(4);
    const int side = static_cast<int>(state.range(0));
    const std::vector<LayerDims> dims(b.instances.size(),
                                      LayerDims{{side, side, 32}, {side, side, 32}});
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_bundle(b, dims, ch().tile(), 16.0, ch()).total_cycles);
    }
}
BENCHMARK(bm_simulate_bundle)->Arg(32)->Arg(64)->Arg(128);

void bm_simulate_dnn(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DnnModel m =
        build_eval_dnn(two_conv_bundle(4), BuildMethod::pure_replication, n, {64, 64, 32});
    const DeviceSpec device = pynq_z1();
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_dnn(m, device, ch()).total_cycles);
    }
}
BENCHMARK(bm_simulate_dnn)->Arg(2)->Arg(8);

} // namespace

BENCHMARK_MAIN();
