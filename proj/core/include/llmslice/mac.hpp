#pragma once
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "llmslice/radio.hpp"
#include "llmslice/slicectl.hpp"
#include "llmslice/time.hpp"

namespace llmslice {

// Per-slice PRB shares, fractions of the grid. Shares must each lie in
// [0,1] and sum to at most 1 (small fp slack allowed).
struct QuotaVector {
    std::map<SliceId, double> entries;
};

enum class SchedulerPolicy { Shared, Static, Dynamic };

struct SchedulerMode {
    SchedulerPolicy policy = SchedulerPolicy::Shared;
    bool work_conserving = false;  // default: off for static, on for dynamic
};

const char* scheduler_policy_name(SchedulerPolicy policy);

// Queues are per (slice, ue): a UE using two services queues in two slices.
struct QueueKey {
    SliceId slice_id;
    UeId ue_id;

    bool operator<(const QueueKey& other) const {
        return std::tie(slice_id, ue_id) < std::tie(other.slice_id, other.ue_id);
    }
    bool operator==(const QueueKey& other) const {
        return slice_id == other.slice_id && ue_id == other.ue_id;
    }
};

struct Segment {
    std::int64_t request_id = kBackgroundRequest;  // -1 for background filler
    std::int64_t bytes = 0;
    SimTime t_enqueued = 0;

    static constexpr std::int64_t kBackgroundRequest = -1;
};

struct UeQueue {
    UeId ue_id;
    SliceId slice_id;
    std::deque<Segment> segments;
    std::int64_t backlog_bytes = 0;

    // Enqueue time of the head segment; partial drains keep the original
    // timestamp, so this is the age of the oldest still-queued byte.
    SimTime hol_wait_start() const { return segments.empty() ? 0 : segments.front().t_enqueued; }
};

struct TtiAllocation {
    std::int64_t tti_index = 0;
    std::map<QueueKey, int> grants;          // every granted queue had backlog
    std::map<SliceId, int> per_slice_granted;
    std::map<SliceId, int> per_slice_used;   // payload-carrying PRBs, set by deliver()
    std::map<QueueKey, int> per_queue_used;
};

struct DeliveryFragment {
    std::int64_t request_id = 0;
    UeId ue_id;
    SliceId slice_id;
    SimTime time = 0;
    std::int64_t bytes = 0;
    bool first_byte = false;  // first delivered byte of the stream
    bool completed = false;   // stream fully delivered with this fragment
};

struct Disconnection {
    std::int64_t request_id = 0;
    UeId ue_id;
    SliceId slice_id;
    SimTime t_abort = 0;
    std::int64_t bytes_undelivered = 0;  // expected - delivered, incl. unqueued tokens
    std::int64_t bytes_wasted = 0;       // already transmitted for the aborted stream
};

// KPI accumulation for one slice over one RIC window.
struct SliceWindowStats {
    std::int64_t arrived_bytes = 0;
    std::int64_t delivered_bytes = 0;
    double hol_ms_sum = 0.0;
    std::int64_t hol_samples = 0;
    std::set<std::int64_t> active_requests;
    int disconnects = 0;
    std::int64_t completed_responses = 0;
    std::int64_t completed_response_bytes = 0;
};

// Integer PRB counts per slice by largest-remainder rounding of
// share * n_prb; remainder ties break by ascending slice_id.
std::map<SliceId, int> partition_prbs(const QuotaVector& quota, int n_prb);

// The gNB downlink scheduler. Owns the per-(slice, ue) queues and the
// round-robin cursors; policy composition (which partition to use per TTI)
// belongs to the run loop.
class Mac {
public:
    Mac(TtiConfig tti, bool work_conserving)
        : tti_(tti), work_conserving_(work_conserving) {}

    const TtiConfig& tti() const { return tti_; }
    bool work_conserving() const { return work_conserving_; }

    // Adds one token payload. expected_total_bytes registers the stream's
    // full size on first enqueue (ignored afterwards).
    void enqueue(const SliceId& slice_id, const UeId& ue_id, std::int64_t request_id,
                 std::int64_t bytes, SimTime now, std::int64_t expected_total_bytes);

    // Background filler: no stream accounting, never times out.
    void enqueue_background(const SliceId& slice_id, const UeId& ue_id, std::int64_t bytes,
                            SimTime now);

    // Hands PRBs out one at a time round-robin over backlogged UEs within
    // each slice, with a persistent per-slice cursor. A UE stops receiving
    // once its backlog fits the PRBs already granted.
    TtiAllocation schedule_tti(const std::map<SliceId, int>& partition,
                               const LinkMap& links, std::int64_t tti_index);

    // Work conservation: re-offers PRBs unused by their owner slice (and any
    // unpartitioned remainder) to still-backlogged UEs of other slices,
    // ascending (slice_id, ue_id), one PRB at a time. No-op when the
    // work_conserving flag is off.
    void reclaim_unused(TtiAllocation& allocation, const LinkMap& links);

    // Drains min(backlog, granted capacity) bytes FIFO per granted queue and
    // fills per_slice_used with ceil(drained / bytes_per_prb) per consumer.
    std::vector<DeliveryFragment> deliver(TtiAllocation& allocation,
                                          const LinkMap& links, SimTime now);

    // Aborts every request whose head segment has waited strictly more than
    // t_disc; all of its segments are purged and exactly one Disconnection
    // is emitted per request. Background heads never abort.
    std::vector<Disconnection> check_timeouts(SimTime now, SimTime t_disc_us);

    std::int64_t backlog_bytes(const SliceId& slice_id) const;
    std::int64_t total_backlog_bytes() const;
    const UeQueue* find_queue(const SliceId& slice_id, const UeId& ue_id) const;

    // Returns and resets the window accumulator for one slice; counts
    // requests still queued at the window edge as active.
    SliceWindowStats take_window(const SliceId& slice_id);

private:
    struct StreamState {
        std::int64_t expected = 0;
        std::int64_t delivered = 0;
    };

    UeQueue& queue_for(const SliceId& slice_id, const UeId& ue_id);
    int cqi_of(const LinkMap& links, const UeId& ue_id) const;
    void sample_hol(SimTime now);

    TtiConfig tti_;
    bool work_conserving_;
    std::map<QueueKey, UeQueue> queues_;
    std::map<SliceId, UeId> rr_cursor_;
    std::map<std::int64_t, StreamState> streams_;
    std::map<SliceId, SliceWindowStats> window_;
};

}  // namespace llmslice
