#pragma once
#include <cstdint>
#include <map>
#include <vector>

#include "llmslice/mac.hpp"
#include "llmslice/slicectl.hpp"
#include "llmslice/time.hpp"

namespace llmslice {

// E2-style per-slice report for one control window, extended with the
// LLM-specific mean_response_bytes metric.
struct KpiReport {
    SliceId slice_id;
    SimTime window_start = 0;
    SimTime window_end = 0;
    std::int64_t arrived_bytes = 0;
    std::int64_t delivered_bytes = 0;
    std::int64_t backlog_bytes = 0;  // at window end
    double mean_hol_delay_ms = 0.0;
    std::int64_t active_streams = 0;
    std::int64_t disconnects = 0;
    double mean_response_bytes = 0.0;  // responses completed in the window
};

struct EwmaEstimator {
    double alpha = 0.2;  // in (0, 1]
    double value = 0.0;
    bool initialized = false;
};

// First observation seeds the estimate; afterwards
// value = alpha * x + (1 - alpha) * value.
EwmaEstimator ewma_update(EwmaEstimator est, double x);

struct QuotaDecision {
    std::int64_t epoch = 0;
    QuotaVector quotas;
    std::map<SliceId, double> rationale;  // per-slice demand score, bytes
};

struct SliceBounds {
    double min_share = 0.0;
    double max_share = 1.0;
};

// Clamped proportional-demand controller: raw share = D_s / sum(D), clamped
// into [min_share, max_share] with the residual redistributed proportionally
// among unclamped slices until stable. Zero total demand splits the budget
// equally, still subject to bounds. Processing order (and hence tie
// breaking) is ascending slice_id.
QuotaVector allocate_shares(const std::map<SliceId, double>& demand,
                            const std::map<SliceId, SliceBounds>& bounds);

// Aggregates one slice's window accumulator into a report.
KpiReport build_report(Mac& mac, const SliceId& slice_id, SimTime window_start,
                       SimTime window_end);

// Per-epoch controller state: one EWMA of arrived bytes per slice.
class RicController {
public:
    explicit RicController(double alpha) : alpha_(alpha) {}

    double alpha() const { return alpha_; }

    // Demand score per slice is backlog + EWMA of per-window arrivals.
    QuotaDecision compute_quotas(const std::vector<KpiReport>& reports,
                                 const std::map<SliceId, SliceBounds>& bounds,
                                 std::int64_t epoch);

    const std::map<SliceId, EwmaEstimator>& estimators() const { return estimators_; }

private:
    double alpha_;
    std::map<SliceId, EwmaEstimator> estimators_;
};

}  // namespace llmslice
