#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llmslice/slicectl.hpp"
#include "llmslice/time.hpp"

namespace llmslice {

// Final per-request accounting. A stream "starts" when its first token
// reaches the downlink queue; only started streams count for stability.
struct DeliveryRecord {
    std::int64_t request_id = 0;
    UeId ue_id;
    SliceId slice_id;
    SimTime t_arrival = 0;
    std::optional<SimTime> t_started;     // first token enqueued
    std::optional<SimTime> t_first_byte;  // first byte delivered
    std::optional<SimTime> t_complete;    // last byte delivered
    std::int64_t total_bytes = 0;         // expected response size
    std::int64_t delivered_bytes = 0;
    bool aborted = false;
};

// Grid occupancy for a whole run; used PRBs are the payload-carrying ones.
struct AllocationTotals {
    std::int64_t n_ttis = 0;
    int n_prb = 0;
    std::int64_t granted_prbs = 0;
    std::int64_t used_prbs = 0;
    std::map<SliceId, std::int64_t> per_slice_used;
};

struct MetricBlock {
    std::optional<double> mean_completion_latency_ms;  // completed requests only
    std::optional<double> mean_first_byte_latency_ms;
    double utilization = 0.0;  // used PRBs / total grid PRBs
    double stability = 1.0;    // 1 - aborted / started streams
    std::int64_t requests = 0;
    std::int64_t streams = 0;  // started
    std::int64_t completions = 0;
    std::int64_t aborts = 0;
};

struct RunSummary {
    std::string mode;
    MetricBlock overall;
    std::map<SliceId, MetricBlock> per_slice;
};

// Relative improvements as fractions: latency falls, the others rise.
struct ComparisonReport {
    RunSummary baseline;
    RunSummary treatment;
    double latency_improvement = 0.0;      // (base - treat) / base
    double utilization_improvement = 0.0;  // (treat - base) / base
    double stability_improvement = 0.0;    // (treat - base) / base
};

// Aborted streams are excluded from latency means but fully counted in
// stability; aborts can't flatter either metric. EmptyRun unless
// allow_empty when no request was admitted.
RunSummary summarize(const std::vector<DeliveryRecord>& records, const AllocationTotals& alloc,
                     const std::string& mode, bool allow_empty = false);

// Equal-weight mean across per-seed summaries; counts are summed.
RunSummary average_summaries(const std::vector<RunSummary>& summaries);

ComparisonReport compare(const RunSummary& baseline, const RunSummary& treatment);

// Fixed-width table: rows Avg. Latency / Resource Utilization / Downlink
// Stability, columns Baseline / LLM-Slice / Improv. (one decimal).
std::string render_comparison_table(const ComparisonReport& report);

// summary.json + deliveries.csv. Deterministic bytes for identical inputs.
void write_run_outputs(const RunSummary& summary, const std::vector<DeliveryRecord>& records,
                       const std::filesystem::path& out_dir);

// comparison.json + comparison.txt.
void write_comparison_outputs(const ComparisonReport& report,
                              const std::filesystem::path& out_dir);

std::string summary_to_json(const RunSummary& summary);
std::string comparison_to_json(const ComparisonReport& report);
std::string deliveries_to_csv(const std::vector<DeliveryRecord>& records);

}  // namespace llmslice
