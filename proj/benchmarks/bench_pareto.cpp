// SPDX-License-Identifier: Apache-2.0
// Banded Pareto selection over growing record sets.
#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "codesign/eval.hpp"

using namespace codesign;

namespace {

std::vector<EvalRecord> random_records(std::size_t n) {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> dsp(0.0, 220.0);
    std::uniform_real_distribution<double> lat(1.0, 100.0);
    std::uniform_real_distribution<double> acc(0.0, 1.0);
    std::vector<EvalRecord> records(n);
    for (EvalRecord& r : records) {
        r.bundle_id = "b" + std::to_string(1 + static_cast<int>(rng() % 18));
        r.resource.dsp = dsp(rng);
        r.latency_ms = lat(rng);
        r.accuracy = acc(rng);
    }
    return records;
}

void bm_pareto_select(benchmark::State& state) {
    const auto records = random_records(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pareto_select(records, 16.0));
    }
}
BENCHMARK(bm_pareto_select)->Arg(100)->Arg(1000)->Arg(10000);

} // namespace
