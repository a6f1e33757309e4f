#pragma once
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "llmslice/mac.hpp"
#include "llmslice/metrics.hpp"
#include "llmslice/ric.hpp"
#include "llmslice/scenario.hpp"
#include "llmslice/trace.hpp"

namespace llmslice {

// A quota decision waiting for its effective TTI boundary.
struct PendingQuota {
    SimTime effective = 0;
    QuotaVector quotas;
};

// First TTI boundary strictly after decided_at + control_delay.
SimTime decision_effective_time(SimTime decided_at, SimTime control_delay_us, SimTime tti_us);

// Queues a RIC decision; ModeMismatch unless the scheduler runs dynamic.
// Returns the effective time.
SimTime schedule_quota_decision(std::deque<PendingQuota>& pending, const QuotaDecision& decision,
                                const SchedulerMode& mode, SimTime now, SimTime control_delay_us,
                                SimTime tti_us);

struct RunResult {
    std::string mode;
    std::uint64_t master_seed = 0;
    RunTrace trace;
    std::vector<DeliveryRecord> records;  // request_id order (admitted requests)
    AllocationTotals alloc;
    std::int64_t denied_requests = 0;
};

// Executes one deterministic run: identical (scenario, seed, policy,
// verbose_trace) inputs yield identical traces and records. Any module
// error aborts with a diagnostic naming the event being handled.
RunResult run_scenario(const Scenario& scenario, std::uint64_t master_seed,
                       SchedulerPolicy policy, bool verbose_trace = false);

}  // namespace llmslice
