#include <benchmark/benchmark.h>

#include "llmslice/mac.hpp"

using namespace llmslice;

// One fully loaded TTI: 4 slices, 8 UEs, everyone backlogged.
static void bench_schedule_tti(benchmark::State& state) {
    const TtiConfig tti{1000, 100};
    LinkMap links;
    std::map<SliceId, int> partition = {{"s0", 25}, {"s1", 25}, {"s2", 25}, {"s3", 25}};

    Mac mac(tti, true);
    for (int u = 0; u < 8; ++u) {
        UeId ue = "ue" + std::to_string(u);
        links[ue] = LinkState{ue, 8 + (u % 7)};
        mac.enqueue("s" + std::to_string(u % 4), ue, u + 1, 50'000'000, 0, 50'000'000);
    }

    std::int64_t tti_index = 0;
    for (auto _ : state) {
        TtiAllocation allocation = mac.schedule_tti(partition, links, tti_index++);
        mac.reclaim_unused(allocation, links);
        auto fragments = mac.deliver(allocation, links, tti_index * tti.tti_us);
        benchmark::DoNotOptimize(fragments.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_schedule_tti);
