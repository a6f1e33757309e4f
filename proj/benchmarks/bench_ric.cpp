#include <benchmark/benchmark.h>

#include "llmslice/ric.hpp"
#include "llmslice/rng.hpp"

using namespace llmslice;

static void bench_allocate_shares(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    RngStream rng(2, "bench/ric");
    std::map<SliceId, double> demand;
    std::map<SliceId, SliceBounds> bounds;
    for (int i = 0; i < n; ++i) {
        SliceId id = "s" + std::to_string(i);
        demand[id] = rng.uniform() * 1e7;
        bounds[id] = SliceBounds{0.5 / n, 0.9};
    }
    for (auto _ : state) {
        QuotaVector quota = allocate_shares(demand, bounds);
        benchmark::DoNotOptimize(quota.entries.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_allocate_shares)->Arg(4)->Arg(16)->Arg(64);
