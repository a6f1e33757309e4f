#include "llmslice/mac.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "llmslice/errors.hpp"

namespace llmslice {

const char* scheduler_policy_name(SchedulerPolicy policy) {
    switch (policy) {
        case SchedulerPolicy::Shared: return "shared";
        case SchedulerPolicy::Static: return "static";
        case SchedulerPolicy::Dynamic: return "dynamic";
    }
    return "?";
}

std::map<SliceId, int> partition_prbs(const QuotaVector& quota, int n_prb) {
    double share_sum = 0.0;
    for (const auto& [slice_id, share] : quota.entries) {
        if (share < 0.0 || share > 1.0 + 1e-9) {
            throw_error(ErrorCode::InvalidQuota,
                        "slice '" + slice_id + "' share " + std::to_string(share));
        }
        share_sum += share;
    }
    if (share_sum > 1.0 + 1e-9) {
        throw_error(ErrorCode::InvalidQuota, "shares sum to " + std::to_string(share_sum));
    }

    std::map<SliceId, int> counts;
    double exact_sum = 0.0;
    std::vector<std::pair<double, SliceId>> remainders;  // (-remainder, id) for sorting
    for (const auto& [slice_id, share] : quota.entries) {
        double exact = share * n_prb;
        exact_sum += exact;
        int base = static_cast<int>(std::floor(exact + 1e-9));
        counts[slice_id] = base;
        double rem = std::max(0.0, exact - base);
        remainders.emplace_back(-rem, slice_id);
    }
    int target = std::min(n_prb, static_cast<int>(std::floor(exact_sum + 1e-6)));
    int assigned = 0;
    for (const auto& [id, c] : counts) assigned += c;

    std::sort(remainders.begin(), remainders.end());  // largest remainder, then ascending id
    int extras = target - assigned;
    assert(extras <= static_cast<int>(remainders.size()));
    for (int i = 0; i < extras; ++i) counts[remainders[static_cast<std::size_t>(i)].second] += 1;
    return counts;
}

UeQueue& Mac::queue_for(const SliceId& slice_id, const UeId& ue_id) {
    QueueKey key{slice_id, ue_id};
    auto it = queues_.find(key);
    if (it == queues_.end()) {
        it = queues_.emplace(key, UeQueue{ue_id, slice_id, {}, 0}).first;
    }
    return it->second;
}

void Mac::enqueue(const SliceId& slice_id, const UeId& ue_id, std::int64_t request_id,
                  std::int64_t bytes, SimTime now, std::int64_t expected_total_bytes) {
    UeQueue& queue = queue_for(slice_id, ue_id);
    queue.segments.push_back(Segment{request_id, bytes, now});
    queue.backlog_bytes += bytes;
    streams_.try_emplace(request_id, StreamState{expected_total_bytes, 0});

    auto& win = window_[slice_id];
    win.arrived_bytes += bytes;
    win.active_requests.insert(request_id);
}

void Mac::enqueue_background(const SliceId& slice_id, const UeId& ue_id, std::int64_t bytes,
                             SimTime now) {
    UeQueue& queue = queue_for(slice_id, ue_id);
    queue.segments.push_back(Segment{Segment::kBackgroundRequest, bytes, now});
    queue.backlog_bytes += bytes;
    window_[slice_id].arrived_bytes += bytes;
}

int Mac::cqi_of(const LinkMap& links, const UeId& ue_id) const {
    auto it = links.find(ue_id);
    if (it == links.end()) {
        throw_error(ErrorCode::InvalidCqi, "no link state for ue '" + ue_id + "'");
    }
    return it->second.cqi;
}

void Mac::sample_hol(SimTime now) {
    std::map<SliceId, std::pair<double, int>> acc;  // slice -> (sum ms, queues)
    for (const auto& [key, queue] : queues_) {
        if (queue.backlog_bytes <= 0) continue;
        auto& slot = acc[key.slice_id];
        slot.first += us_to_ms(now - queue.hol_wait_start());
        slot.second += 1;
    }
    for (const auto& [slice_id, slot] : acc) {
        auto& win = window_[slice_id];
        win.hol_ms_sum += slot.first / slot.second;
        win.hol_samples += 1;
    }
}

TtiAllocation Mac::schedule_tti(const std::map<SliceId, int>& partition,
                                const LinkMap& links, std::int64_t tti_index) {
    sample_hol(tti_index * tti_.tti_us);

    TtiAllocation allocation;
    allocation.tti_index = tti_index;

    for (const auto& [slice_id, slice_prbs] : partition) {
        if (slice_prbs <= 0) continue;

        // Backlogged members of this slice, ascending ue_id.
        std::vector<const UeQueue*> members;
        for (auto it = queues_.lower_bound(QueueKey{slice_id, ""});
             it != queues_.end() && it->first.slice_id == slice_id; ++it) {
            if (it->second.backlog_bytes > 0) members.push_back(&it->second);
        }
        if (members.empty()) continue;

        std::size_t pos = 0;
        auto cursor = rr_cursor_.find(slice_id);
        if (cursor != rr_cursor_.end()) {
            auto lb = std::lower_bound(members.begin(), members.end(), cursor->second,
                                       [](const UeQueue* q, const UeId& id) { return q->ue_id < id; });
            pos = (lb == members.end()) ? 0 : static_cast<std::size_t>(lb - members.begin());
        }

        std::vector<int> granted(members.size(), 0);
        std::vector<bool> done(members.size(), false);
        std::size_t done_count = 0;
        int remaining = slice_prbs;
        std::size_t last_granted = members.size();  // sentinel: none

        while (remaining > 0 && done_count < members.size()) {
            if (!done[pos]) {
                granted[pos] += 1;
                remaining -= 1;
                last_granted = pos;
                std::int64_t capacity =
                    static_cast<std::int64_t>(granted[pos]) * bytes_per_prb(cqi_of(links, members[pos]->ue_id));
                if (capacity >= members[pos]->backlog_bytes) {
                    done[pos] = true;
                    ++done_count;
                }
            }
            pos = (pos + 1) % members.size();
        }

        for (std::size_t i = 0; i < members.size(); ++i) {
            if (granted[i] == 0) continue;
            allocation.grants[QueueKey{slice_id, members[i]->ue_id}] = granted[i];
            allocation.per_slice_granted[slice_id] += granted[i];
        }
        if (last_granted != members.size()) {
            rr_cursor_[slice_id] = members[(last_granted + 1) % members.size()]->ue_id;
        }
    }
    return allocation;
}

void Mac::reclaim_unused(TtiAllocation& allocation, const LinkMap& links) {
    if (!work_conserving_) return;

    int granted_total = 0;
    for (const auto& [key, prbs] : allocation.grants) granted_total += prbs;
    int pool = tti_.n_prb - granted_total;
    if (pool <= 0) return;

    // Queues still hungry after the within-slice pass. Their own slice pool
    // is exhausted by construction, so these are "other slices" relative to
    // every leftover PRB. Fresh ascending pass each TTI.
    struct Hungry {
        const UeQueue* queue;
        std::int64_t capacity;  // bytes already granted this TTI
        std::int64_t per_prb;
    };
    std::vector<Hungry> hungry;
    for (const auto& [key, queue] : queues_) {
        if (queue.backlog_bytes <= 0) continue;
        std::int64_t per_prb = bytes_per_prb(cqi_of(links, key.ue_id));
        auto it = allocation.grants.find(key);
        std::int64_t capacity = (it == allocation.grants.end())
                                    ? 0
                                    : static_cast<std::int64_t>(it->second) * per_prb;
        if (capacity < queue.backlog_bytes) hungry.push_back(Hungry{&queue, capacity, per_prb});
    }
    if (hungry.empty()) return;

    std::size_t pos = 0;
    std::size_t satisfied = 0;
    std::vector<bool> done(hungry.size(), false);
    while (pool > 0 && satisfied < hungry.size()) {
        if (!done[pos]) {
            Hungry& h = hungry[pos];
            QueueKey key{h.queue->slice_id, h.queue->ue_id};
            allocation.grants[key] += 1;
            allocation.per_slice_granted[h.queue->slice_id] += 1;
            h.capacity += h.per_prb;
            pool -= 1;
            if (h.capacity >= h.queue->backlog_bytes) {
                done[pos] = true;
                ++satisfied;
            }
        }
        pos = (pos + 1) % hungry.size();
    }
}

std::vector<DeliveryFragment> Mac::deliver(TtiAllocation& allocation,
                                           const LinkMap& links, SimTime now) {
    std::vector<DeliveryFragment> fragments;

    for (auto& [key, prbs] : allocation.grants) {
        auto queue_it = queues_.find(key);
        if (queue_it == queues_.end()) continue;
        UeQueue& queue = queue_it->second;

        std::int64_t per_prb = bytes_per_prb(cqi_of(links, key.ue_id));
        std::int64_t capacity = static_cast<std::int64_t>(prbs) * per_prb;
        std::int64_t to_drain = std::min(capacity, queue.backlog_bytes);
        if (to_drain <= 0) continue;

        std::int64_t used_prbs = (to_drain + per_prb - 1) / per_prb;
        allocation.per_slice_used[key.slice_id] += static_cast<int>(used_prbs);
        allocation.per_queue_used[key] = static_cast<int>(used_prbs);

        auto& win = window_[key.slice_id];
        win.delivered_bytes += to_drain;

        std::int64_t left = to_drain;
        std::map<std::int64_t, std::int64_t> drained_by_request;  // keeps request order stable
        while (left > 0 && !queue.segments.empty()) {
            Segment& head = queue.segments.front();
            std::int64_t take = std::min(left, head.bytes);
            head.bytes -= take;
            left -= take;
            queue.backlog_bytes -= take;
            drained_by_request[head.request_id] += take;
            if (head.bytes == 0) queue.segments.pop_front();
        }

        for (const auto& [request_id, bytes] : drained_by_request) {
            if (request_id == Segment::kBackgroundRequest) continue;
            auto stream_it = streams_.find(request_id);
            if (stream_it == streams_.end()) continue;
            StreamState& stream = stream_it->second;
            DeliveryFragment fragment;
            fragment.request_id = request_id;
            fragment.ue_id = key.ue_id;
            fragment.slice_id = key.slice_id;
            fragment.time = now;
            fragment.bytes = bytes;
            fragment.first_byte = (stream.delivered == 0);
            stream.delivered += bytes;
            fragment.completed = (stream.delivered >= stream.expected);
            if (fragment.completed) {
                win.completed_responses += 1;
                win.completed_response_bytes += stream.expected;
                streams_.erase(stream_it);
            }
            win.active_requests.insert(request_id);
            fragments.push_back(fragment);
        }
    }
    return fragments;
}

std::vector<Disconnection> Mac::check_timeouts(SimTime now, SimTime t_disc_us) {
    std::vector<Disconnection> disconnections;
    for (auto& [key, queue] : queues_) {
        while (!queue.segments.empty()) {
            const Segment& head = queue.segments.front();
            if (head.request_id == Segment::kBackgroundRequest) break;  // filler never aborts
            if (now - head.t_enqueued <= t_disc_us) break;

            std::int64_t victim = head.request_id;
            std::int64_t purged = 0;
            std::deque<Segment> kept;
            for (Segment& segment : queue.segments) {
                if (segment.request_id == victim) {
                    purged += segment.bytes;
                } else {
                    kept.push_back(segment);
                }
            }
            queue.segments = std::move(kept);
            queue.backlog_bytes -= purged;

            Disconnection disc;
            disc.request_id = victim;
            disc.ue_id = key.ue_id;
            disc.slice_id = key.slice_id;
            disc.t_abort = now;
            auto stream_it = streams_.find(victim);
            if (stream_it != streams_.end()) {
                disc.bytes_undelivered = stream_it->second.expected - stream_it->second.delivered;
                disc.bytes_wasted = stream_it->second.delivered;
                streams_.erase(stream_it);
            } else {
                disc.bytes_undelivered = purged;
            }
            window_[key.slice_id].disconnects += 1;
            disconnections.push_back(disc);
        }
    }
    return disconnections;
}

std::int64_t Mac::backlog_bytes(const SliceId& slice_id) const {
    std::int64_t total = 0;
    for (auto it = queues_.lower_bound(QueueKey{slice_id, ""});
         it != queues_.end() && it->first.slice_id == slice_id; ++it) {
        total += it->second.backlog_bytes;
    }
    return total;
}

std::int64_t Mac::total_backlog_bytes() const {
    std::int64_t total = 0;
    for (const auto& [key, queue] : queues_) total += queue.backlog_bytes;
    return total;
}

const UeQueue* Mac::find_queue(const SliceId& slice_id, const UeId& ue_id) const {
    auto it = queues_.find(QueueKey{slice_id, ue_id});
    return it == queues_.end() ? nullptr : &it->second;
}

SliceWindowStats Mac::take_window(const SliceId& slice_id) {
    SliceWindowStats stats;
    auto it = window_.find(slice_id);
    if (it != window_.end()) {
        stats = std::move(it->second);
        it->second = SliceWindowStats{};
    }
    // Streams still queued at the window edge are in flight too.
    for (auto qit = queues_.lower_bound(QueueKey{slice_id, ""});
         qit != queues_.end() && qit->first.slice_id == slice_id; ++qit) {
        for (const Segment& segment : qit->second.segments) {
            if (segment.request_id != Segment::kBackgroundRequest) {
                stats.active_requests.insert(segment.request_id);
            }
        }
    }
    return stats;
}

}  // namespace llmslice
