#include <benchmark/benchmark.h>

#include <cmath>

#include "llmslice/sim.hpp"

using namespace llmslice;

namespace {

// 4 UEs, one slice, one second of simulated traffic.
Scenario small_scenario() {
    Scenario scenario;
    scenario.name = "bench";
    scenario.horizon_ms = 1000;
    scenario.tti = TtiConfig{1000, 100};
    scenario.mode = SchedulerPolicy::Static;

    ServiceProfile service;
    service.service_id = "svc";
    service.tokens_mu = std::log(8.0);
    service.tokens_sigma = 0.5;
    service.tokens_min = 1;
    service.tokens_max = 32;
    service.bytes_per_token = 10'000;
    service.token_interval_ms = 1.0;
    service.first_token_delay_ms = 60.0;
    scenario.services.push_back(service);

    SliceDescriptor slice;
    slice.slice_id = "svc";
    slice.service_id = "svc";
    slice.min_share = 0.5;
    slice.max_share = 1.0;
    scenario.slices.push_back(slice);

    for (int u = 0; u < 4; ++u) {
        UeConfig ue;
        ue.ue_id = "ue" + std::to_string(u);
        ue.cqi = 10;
        ue.services = {"svc"};
        scenario.ues.push_back(ue);

        ArrivalConfig arrival;
        arrival.ue_id = ue.ue_id;
        arrival.service_id = "svc";
        arrival.process.rate_per_s = 10.0;
        scenario.arrivals.push_back(arrival);

        scenario.permissions.add(PermissionRecord{ue.ue_id, "svc", true, "standard"});
    }
    return scenario;
}

}  // namespace

static void bench_full_run(benchmark::State& state) {
    Scenario scenario = small_scenario();
    std::uint64_t seed = 1;
    for (auto _ : state) {
        RunResult result = run_scenario(scenario, seed++, SchedulerPolicy::Static);
        benchmark::DoNotOptimize(result.records.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_full_run);
