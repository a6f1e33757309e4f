#include <benchmark/benchmark.h>

#include "llmslice/event_queue.hpp"
#include "llmslice/rng.hpp"

using namespace llmslice;

static void bench_schedule_pop(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    RngStream rng(1, "bench/queue");
    std::vector<SimTime> times;
    times.reserve(n);
    for (int i = 0; i < n; ++i) times.push_back(static_cast<SimTime>(rng.uniform_int(1'000'000)));

    for (auto _ : state) {
        EventQueue queue;
        for (SimTime t : times) queue.schedule(t, EventKind::TimeoutCheck, TimeoutCheckPayload{});
        while (auto event = queue.pop_next()) benchmark::DoNotOptimize(event->seq);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_schedule_pop)->Arg(1'000)->Arg(100'000);
