#include "llmslice/ric.hpp"

#include <cmath>
#include <string>

#include "llmslice/errors.hpp"

namespace llmslice {

EwmaEstimator ewma_update(EwmaEstimator est, double x) {
    if (!est.initialized) {
        est.value = x;
        est.initialized = true;
    } else {
        est.value = est.alpha * x + (1.0 - est.alpha) * est.value;
    }
    return est;
}

QuotaVector allocate_shares(const std::map<SliceId, double>& demand,
                            const std::map<SliceId, SliceBounds>& bounds) {
    struct Item {
        SliceId slice_id;
        double score;
        SliceBounds bounds;
        bool clamped = false;
        double share = 0.0;
    };
    std::vector<Item> items;
    double min_sum = 0.0;
    double demand_sum = 0.0;
    for (const auto& [slice_id, d] : demand) {
        auto it = bounds.find(slice_id);
        if (it == bounds.end()) {
            throw_error(ErrorCode::InfeasibleBounds, "no bounds for slice '" + slice_id + "'");
        }
        items.push_back(Item{slice_id, d, it->second});
        min_sum += it->second.min_share;
        demand_sum += d;
    }
    if (min_sum > 1.0 + 1e-9) {
        throw_error(ErrorCode::InfeasibleBounds,
                    "min_share sum " + std::to_string(min_sum) + " exceeds 1");
    }
    // Zero aggregate demand: equal split, still subject to bounds.
    if (demand_sum <= 0.0) {
        for (Item& item : items) item.score = 1.0;
    }

    double budget = 1.0;
    double free_demand = 0.0;
    for (const Item& item : items) free_demand += item.score;
    auto proportional = [&](double d) { return free_demand > 0.0 ? budget * d / free_demand : 0.0; };
    auto clamp_at = [&](Item& item, double value) {
        item.share = value;
        item.clamped = true;
        budget -= value;
        free_demand -= item.score;
    };

    // Phase 1: clamp below-minimum slices. Each clamp shrinks the budget
    // faster than the demand pool, so proportional shares of the rest only
    // fall, and the violation set grows monotonically (order-independent).
    // Phase 2: clamp above-maximum slices; now shares only rise, which can
    // expose further maxima but never a new minimum. Each clamp is
    // permanent, so both loops terminate within items.size() passes.
    bool changed = true;
    while (changed) {
        changed = false;
        for (Item& item : items) {
            if (item.clamped) continue;
            if (proportional(item.score) < item.bounds.min_share - 1e-12) {
                clamp_at(item, item.bounds.min_share);
                changed = true;
            }
        }
    }
    changed = true;
    while (changed) {
        changed = false;
        for (Item& item : items) {
            if (item.clamped) continue;
            if (proportional(item.score) > item.bounds.max_share + 1e-12) {
                clamp_at(item, item.bounds.max_share);
                changed = true;
            }
        }
    }

    QuotaVector result;
    for (Item& item : items) {
        result.entries[item.slice_id] = item.clamped ? item.share : proportional(item.score);
    }
    return result;
}

KpiReport build_report(Mac& mac, const SliceId& slice_id, SimTime window_start,
                       SimTime window_end) {
    SliceWindowStats stats = mac.take_window(slice_id);
    KpiReport report;
    report.slice_id = slice_id;
    report.window_start = window_start;
    report.window_end = window_end;
    report.arrived_bytes = stats.arrived_bytes;
    report.delivered_bytes = stats.delivered_bytes;
    report.backlog_bytes = mac.backlog_bytes(slice_id);
    report.mean_hol_delay_ms =
        stats.hol_samples > 0 ? stats.hol_ms_sum / static_cast<double>(stats.hol_samples) : 0.0;
    report.active_streams = static_cast<std::int64_t>(stats.active_requests.size());
    report.disconnects = stats.disconnects;
    report.mean_response_bytes =
        stats.completed_responses > 0
            ? static_cast<double>(stats.completed_response_bytes) /
                  static_cast<double>(stats.completed_responses)
            : 0.0;
    return report;
}

QuotaDecision RicController::compute_quotas(const std::vector<KpiReport>& reports,
                                            const std::map<SliceId, SliceBounds>& bounds,
                                            std::int64_t epoch) {
    QuotaDecision decision;
    decision.epoch = epoch;
    for (const KpiReport& report : reports) {
        auto it = estimators_.find(report.slice_id);
        if (it == estimators_.end()) {
            it = estimators_.emplace(report.slice_id, EwmaEstimator{alpha_, 0.0, false}).first;
        }
        it->second = ewma_update(it->second, static_cast<double>(report.arrived_bytes));
        decision.rationale[report.slice_id] =
            static_cast<double>(report.backlog_bytes) + it->second.value;
    }
    decision.quotas = allocate_shares(decision.rationale, bounds);
    return decision;
}

}  // namespace llmslice
