#include "llmslice/sim.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "llmslice/errors.hpp"
#include "llmslice/event_queue.hpp"
#include "llmslice/log.hpp"
#include "llmslice/rng.hpp"
#include "llmslice/workload.hpp"

namespace llmslice {

namespace {

const SliceId kPoolSlice = "pool";
const ServiceId kBackgroundService = "background";
const SliceId kBackgroundSlice = "background";
constexpr SimTime kTimeoutScanUs = 100 * kUsPerMs;
constexpr std::int64_t kPromptBytes = 256;  // recorded only; uplink cost is the fixed delay

struct PendingToken {
    std::int64_t request_id = 0;
    int token_index = 0;
    std::int64_t bytes = 0;
};

class Simulation {
public:
    Simulation(const Scenario& scenario, std::uint64_t master_seed, SchedulerPolicy policy,
               bool verbose)
        : scenario_(scenario),
          policy_(policy),
          mode_(scenario.effective_mode(policy)),
          master_seed_(master_seed),
          verbose_(verbose),
          mac_(scenario.tti, mode_.work_conserving),
          horizon_(scenario.horizon_us()),
          control_delay_us_(ms_to_us(scenario.delays.control_delay_ms)),
          uplink_delay_us_(ms_to_us(scenario.delays.uplink_delay_ms)),
          t_disc_us_(ms_to_us(scenario.timeouts.t_disc_ms)) {
        if (policy_ == SchedulerPolicy::Dynamic) {
            ric_.emplace(scenario.ric ? scenario.ric->alpha : RicConfig{}.alpha);
            epoch_us_ = ms_to_us(scenario.ric ? scenario.ric->epoch_ms : RicConfig{}.epoch_ms);
        }
        for (const UeConfig& ue : scenario.ues) links_[ue.ue_id] = LinkState{ue.ue_id, ue.cqi};
    }

    RunResult run();

private:
    struct Arrival {
        SimTime time = 0;
        const UeConfig* ue = nullptr;
        const ServiceProfile* service = nullptr;
    };

    bool sliced() const { return policy_ != SchedulerPolicy::Shared; }

    void setup();
    void dispatch(const Event& event);
    void on_request_arrival(const RequestArrivalPayload& payload);
    void on_token_ready(const TokenReadyPayload& payload);
    void on_tti(const TtiTickPayload& payload);
    void on_ric(const RicTickPayload& payload);
    void on_control(const ControlMessage& msg);
    void on_timeout_scan();
    void on_horizon_end();

    void send_control(MsgKind kind, const SliceId& slice_id, const UeId& ue_id, bool ok);
    void on_slice_activated(const SliceId& slice_id);
    void refresh_quota_on_activation();
    void enqueue_token(DeliveryRecord& record, const SliceId& slice_id, std::int64_t bytes);
    const SliceDescriptor& descriptor_of(const SliceId& slice_id) const;
    UeId requester_of(const SliceDescriptor& slice) const;
    void trace_state(const SliceId& slice_id, SliceState state);

    const Scenario& scenario_;
    SchedulerPolicy policy_;
    SchedulerMode mode_;
    std::uint64_t master_seed_;
    bool verbose_;

    EventQueue queue_;
    Mac mac_;
    SliceRegistry registry_;
    std::optional<RicController> ric_;
    LinkMap links_;
    RunTrace trace_;
    std::vector<DeliveryRecord> records_;
    AllocationTotals totals_;

    SimTime horizon_;
    SimTime control_delay_us_;
    SimTime uplink_delay_us_;
    SimTime t_disc_us_;
    SimTime epoch_us_ = 0;

    std::vector<Arrival> arrivals_;
    std::map<std::pair<UeId, ServiceId>, RngStream> response_rng_;
    std::map<SliceId, std::vector<PendingToken>> pending_tokens_;
    QuotaVector current_quota_;
    std::deque<PendingQuota> pending_quotas_;
    bool decision_seen_ = false;
    std::vector<double> bg_accum_;
    std::int64_t denied_ = 0;
};

void Simulation::setup() {
    queue_.schedule(horizon_, EventKind::HorizonEnd, HorizonEndPayload{});
    if (horizon_ > 0) {
        queue_.schedule(0, EventKind::TtiTick, TtiTickPayload{0});
    }
    if (kTimeoutScanUs < horizon_) {
        queue_.schedule(kTimeoutScanUs, EventKind::TimeoutCheck, TimeoutCheckPayload{});
    }
    if (policy_ == SchedulerPolicy::Dynamic && epoch_us_ < horizon_) {
        queue_.schedule(epoch_us_, EventKind::RicTick, RicTickPayload{1});
    }

    if (sliced()) {
        for (const SliceDescriptor& slice : scenario_.slices) {
            SimTime delivery = control_delay_us_;
            if (delivery >= horizon_) continue;
            queue_.schedule(delivery, EventKind::ControlMessage,
                            ControlMessage{MsgKind::SliceRequest, slice.slice_id,
                                           requester_of(slice), 0, false});
        }
    }

    // Pre-generate all request arrivals, one independent stream per
    // (ue, service) pair so scenarios compose without cross-talk.
    std::vector<const ArrivalConfig*> configs;
    for (const ArrivalConfig& arrival : scenario_.arrivals) configs.push_back(&arrival);
    std::sort(configs.begin(), configs.end(), [](const ArrivalConfig* a, const ArrivalConfig* b) {
        return std::tie(a->ue_id, a->service_id) < std::tie(b->ue_id, b->service_id);
    });
    for (const ArrivalConfig* config : configs) {
        RngStream rng(master_seed_, "arrivals/" + config->ue_id + "/" + config->service_id);
        response_rng_.try_emplace({config->ue_id, config->service_id}, master_seed_,
                                  "responses/" + config->ue_id + "/" + config->service_id);
        const UeConfig* ue = scenario_.find_ue(config->ue_id);
        const ServiceProfile* service = scenario_.find_service(config->service_id);
        for (SimTime t : sample_request_arrivals(config->process, horizon_, rng)) {
            std::int64_t index = static_cast<std::int64_t>(arrivals_.size());
            arrivals_.push_back(Arrival{t, ue, service});
            queue_.schedule(t, EventKind::RequestArrival, RequestArrivalPayload{index});
        }
    }

    bg_accum_.assign(scenario_.background.size(), 0.0);
}

UeId Simulation::requester_of(const SliceDescriptor& slice) const {
    // First UE (ascending id) that actually uses the slice's service.
    std::vector<const UeConfig*> ues;
    for (const UeConfig& ue : scenario_.ues) ues.push_back(&ue);
    std::sort(ues.begin(), ues.end(),
              [](const UeConfig* a, const UeConfig* b) { return a->ue_id < b->ue_id; });
    if (slice.service_id == kBackgroundService) {
        for (const UeConfig* ue : ues) {
            for (const BackgroundFlow& flow : scenario_.background) {
                if (flow.ue_id == ue->ue_id) return ue->ue_id;
            }
        }
    } else {
        for (const UeConfig* ue : ues) {
            for (const ServiceId& sid : ue->services) {
                if (sid == slice.service_id) return ue->ue_id;
            }
        }
    }
    return ues.front()->ue_id;
}

const SliceDescriptor& Simulation::descriptor_of(const SliceId& slice_id) const {
    for (const SliceDescriptor& slice : scenario_.slices) {
        if (slice.slice_id == slice_id) return slice;
    }
    throw_error(ErrorCode::CrossRefError, "unknown slice '" + slice_id + "'");
}

void Simulation::trace_state(const SliceId& slice_id, SliceState state) {
    trace_.add(queue_.now(), "slice_state", slice_id + " " + slice_state_name(state));
}

void Simulation::send_control(MsgKind kind, const SliceId& slice_id, const UeId& ue_id, bool ok) {
    SimTime delivery = queue_.now() + control_delay_us_;
    if (delivery >= horizon_) return;  // run ends before it would land
    queue_.schedule(delivery, EventKind::ControlMessage,
                    ControlMessage{kind, slice_id, ue_id, queue_.now(), ok});
}

void Simulation::on_request_arrival(const RequestArrivalPayload& payload) {
    const Arrival& arrival = arrivals_[static_cast<std::size_t>(payload.arrival_index)];
    SimTime now = queue_.now();
    SliceId slice_id = kPoolSlice;

    if (sliced()) {
        const SliceDescriptor* slice = scenario_.slice_for_service(arrival.service->service_id);
        slice_id = slice->slice_id;
        if (!scenario_.permissions.authorize(arrival.ue->ue_id, arrival.service->service_id)) {
            ++denied_;
            trace_.add(now, "request_denied",
                       arrival.ue->ue_id + " " + arrival.service->service_id + " permission");
            return;
        }
        if (registry_.contains(slice_id)) {
            SliceState state = registry_.state(slice_id);
            if (state == SliceState::Rejected || state == SliceState::Released) {
                ++denied_;
                trace_.add(now, "request_denied",
                           arrival.ue->ue_id + " " + arrival.service->service_id + " slice_" +
                               slice_state_name(state));
                return;
            }
        }
    }

    LlmRequest request;
    request.request_id = static_cast<std::int64_t>(records_.size()) + 1;
    request.ue_id = arrival.ue->ue_id;
    request.service_id = arrival.service->service_id;
    request.t_arrival = now;
    request.prompt_bytes = kPromptBytes;

    auto rng_it = response_rng_.find({request.ue_id, request.service_id});
    TokenStream stream = sample_token_stream(*arrival.service, request.request_id,
                                             rng_it->second);

    DeliveryRecord record;
    record.request_id = request.request_id;
    record.ue_id = request.ue_id;
    record.slice_id = slice_id;
    record.t_arrival = request.t_arrival;
    record.total_bytes = stream.total_bytes();
    records_.push_back(record);

    std::ostringstream fields;
    fields << request.request_id << ' ' << request.ue_id << ' ' << request.service_id << ' '
           << slice_id << " prompt=" << request.prompt_bytes << " tokens=" << stream.n_tokens
           << " bytes=" << stream.total_bytes();
    trace_.add(now, "request_arrival", fields.str());

    // Uplink (prompt) costs a fixed delay before the model starts streaming.
    SimTime t_start = request.t_arrival + uplink_delay_us_;
    int index = 0;
    for (const auto& [t_token, bytes] : token_enqueue_schedule(stream, t_start)) {
        if (t_token < horizon_) {
            queue_.schedule(t_token, EventKind::TokenReady,
                            TokenReadyPayload{request.request_id, index, bytes});
        }
        ++index;
    }
}

void Simulation::enqueue_token(DeliveryRecord& record, const SliceId& slice_id,
                               std::int64_t bytes) {
    mac_.enqueue(slice_id, record.ue_id, record.request_id, bytes, queue_.now(),
                 record.total_bytes);
    if (!record.t_started) record.t_started = queue_.now();
}

void Simulation::on_token_ready(const TokenReadyPayload& payload) {
    DeliveryRecord& record = records_[static_cast<std::size_t>(payload.request_id) - 1];
    if (record.aborted) return;  // stream already disconnected

    if (verbose_) {
        std::ostringstream fields;
        fields << payload.request_id << " k=" << payload.token_index << " bytes=" << payload.bytes;
        trace_.add(queue_.now(), "token_ready", fields.str());
    }

    if (!sliced()) {
        enqueue_token(record, kPoolSlice, payload.bytes);
        return;
    }
    const SliceId& slice_id = record.slice_id;
    if (!registry_.contains(slice_id)) {
        pending_tokens_[slice_id].push_back(
            PendingToken{payload.request_id, payload.token_index, payload.bytes});
        return;
    }
    switch (registry_.state(slice_id)) {
        case SliceState::Active:
            enqueue_token(record, slice_id, payload.bytes);
            break;
        case SliceState::Rejected:
        case SliceState::Released:
            break;  // slice is gone; token dropped
        default:
            pending_tokens_[slice_id].push_back(
                PendingToken{payload.request_id, payload.token_index, payload.bytes});
            break;
    }
}

void Simulation::refresh_quota_on_activation() {
    // Dynamic hands the vector to the RIC once the first decision lands;
    // until then (and always, for static) the partition is demand-free.
    if (policy_ == SchedulerPolicy::Dynamic && decision_seen_) return;

    // Static mode: a fixed partition proportional to the configured
    // guarantees (min_share), clamped to the bounds; all-zero guarantees
    // fall back to an equal split. Dynamic starts from the equal split.
    std::map<SliceId, double> demand;
    std::map<SliceId, SliceBounds> bounds;
    for (const SliceId& slice_id : registry_.active_slices()) {
        const SliceDescriptor& desc = descriptor_of(slice_id);
        demand[slice_id] = policy_ == SchedulerPolicy::Static ? desc.min_share : 0.0;
        bounds[slice_id] = SliceBounds{desc.min_share, desc.max_share};
    }
    if (!demand.empty()) current_quota_ = allocate_shares(demand, bounds);
}

void Simulation::on_slice_activated(const SliceId& slice_id) {
    auto it = pending_tokens_.find(slice_id);
    if (it != pending_tokens_.end()) {
        for (const PendingToken& token : it->second) {
            DeliveryRecord& record = records_[static_cast<std::size_t>(token.request_id) - 1];
            if (record.aborted) continue;
            enqueue_token(record, slice_id, token.bytes);
        }
        pending_tokens_.erase(it);
    }
    refresh_quota_on_activation();
}

void Simulation::on_control(const ControlMessage& msg) {
    std::ostringstream fields;
    fields << msg_kind_name(msg.kind) << ' ' << msg.slice_id << ' ' << msg.ue_id;
    if (msg.kind == MsgKind::PermissionReply) fields << (msg.ok ? " ok" : " deny");
    trace_.add(queue_.now(), "control_message", fields.str());

    switch (msg.kind) {
        case MsgKind::SliceRequest: {
            registry_.request(descriptor_of(msg.slice_id));
            trace_state(msg.slice_id, SliceState::Requested);
            send_control(MsgKind::Register, msg.slice_id, msg.ue_id, false);
            break;
        }
        case MsgKind::Register: {
            registry_.register_slice(descriptor_of(msg.slice_id));
            trace_state(msg.slice_id, SliceState::Registered);
            send_control(MsgKind::PermissionQuery, msg.slice_id, msg.ue_id, false);
            break;
        }
        case MsgKind::PermissionQuery: {
            trace_state(msg.slice_id, registry_.step(msg.slice_id, msg));
            bool ok = scenario_.permissions.authorize(msg.ue_id,
                                                      descriptor_of(msg.slice_id).service_id);
            send_control(MsgKind::PermissionReply, msg.slice_id, msg.ue_id, ok);
            break;
        }
        case MsgKind::PermissionReply: {
            SliceState state = registry_.step(msg.slice_id, msg);
            trace_state(msg.slice_id, state);
            if (state == SliceState::Active) {
                on_slice_activated(msg.slice_id);
                send_control(MsgKind::Activate, msg.slice_id, msg.ue_id, false);
            } else {
                pending_tokens_.erase(msg.slice_id);
                send_control(MsgKind::Reject, msg.slice_id, msg.ue_id, false);
            }
            break;
        }
        case MsgKind::Activate:
        case MsgKind::Reject:
            break;  // UE notifications, no state change
        case MsgKind::Release: {
            trace_state(msg.slice_id, registry_.step(msg.slice_id, msg));
            break;
        }
    }
}

void Simulation::on_tti(const TtiTickPayload& payload) {
    SimTime now = queue_.now();

    while (!pending_quotas_.empty() && pending_quotas_.front().effective <= now) {
        current_quota_ = pending_quotas_.front().quotas;
        pending_quotas_.pop_front();
    }

    // Background filler accrues per TTI and enqueues whole packets. Before
    // its slice is active the offered load is simply dropped.
    for (std::size_t i = 0; i < scenario_.background.size(); ++i) {
        const BackgroundFlow& flow = scenario_.background[i];
        if (flow.rate_bytes_per_s <= 0) continue;
        SliceId slice_id = kPoolSlice;
        if (sliced()) {
            if (!registry_.contains(kBackgroundSlice) ||
                registry_.state(kBackgroundSlice) != SliceState::Active) {
                continue;
            }
            slice_id = kBackgroundSlice;
        }
        bg_accum_[i] += flow.rate_bytes_per_s * static_cast<double>(scenario_.tti.tti_us) / 1e6;
        while (bg_accum_[i] >= static_cast<double>(flow.packet_bytes)) {
            mac_.enqueue_background(slice_id, flow.ue_id, flow.packet_bytes, now);
            bg_accum_[i] -= static_cast<double>(flow.packet_bytes);
        }
    }

    std::map<SliceId, int> partition;
    if (!sliced()) {
        partition[kPoolSlice] = scenario_.tti.n_prb;
    } else {
        partition = partition_prbs(current_quota_, scenario_.tti.n_prb);
    }

    TtiAllocation allocation = mac_.schedule_tti(partition, links_, payload.tti_index);
    mac_.reclaim_unused(allocation, links_);
    std::vector<DeliveryFragment> fragments = mac_.deliver(allocation, links_, now);

    for (const DeliveryFragment& fragment : fragments) {
        DeliveryRecord& record = records_[static_cast<std::size_t>(fragment.request_id) - 1];
        if (fragment.first_byte) record.t_first_byte = now;
        record.delivered_bytes += fragment.bytes;
        if (fragment.completed) {
            record.t_complete = now;
            std::ostringstream fields;
            fields << fragment.request_id << " bytes=" << record.total_bytes
                   << " latency_ms=" << us_to_ms(now - record.t_arrival);
            trace_.add(now, "complete", fields.str());
        } else if (verbose_) {
            std::ostringstream fields;
            fields << fragment.request_id << " bytes=" << fragment.bytes;
            trace_.add(now, "delivery", fields.str());
        }
    }

    totals_.n_ttis += 1;
    for (const auto& [slice_id, granted] : allocation.per_slice_granted) {
        totals_.granted_prbs += granted;
    }
    for (const auto& [slice_id, used] : allocation.per_slice_used) {
        totals_.used_prbs += used;
        totals_.per_slice_used[slice_id] += used;
    }
    if (verbose_) {
        for (const auto& [key, prbs] : allocation.grants) {
            auto used_it = allocation.per_queue_used.find(key);
            std::ostringstream fields;
            fields << payload.tti_index << ' ' << key.slice_id << ' ' << key.ue_id << " prbs="
                   << prbs << " used="
                   << (used_it == allocation.per_queue_used.end() ? 0 : used_it->second);
            trace_.add(now, "alloc", fields.str());
        }
    }

    SimTime next = now + scenario_.tti.tti_us;
    if (next < horizon_) {
        queue_.schedule(next, EventKind::TtiTick, TtiTickPayload{payload.tti_index + 1});
    }
}

void Simulation::on_ric(const RicTickPayload& payload) {
    SimTime now = queue_.now();
    std::vector<SliceId> active = registry_.active_slices();
    if (!active.empty()) {
        std::vector<KpiReport> reports;
        std::map<SliceId, SliceBounds> bounds;
        for (const SliceId& slice_id : active) {
            reports.push_back(build_report(mac_, slice_id, now - epoch_us_, now));
            const SliceDescriptor& desc = descriptor_of(slice_id);
            bounds[slice_id] = SliceBounds{desc.min_share, desc.max_share};
        }
        QuotaDecision decision = ric_->compute_quotas(reports, bounds, payload.epoch);
        SimTime effective = schedule_quota_decision(pending_quotas_, decision, mode_, now,
                                                    control_delay_us_, scenario_.tti.tti_us);
        decision_seen_ = true;

        std::ostringstream fields;
        fields << "epoch=" << payload.epoch << " effective=" << effective;
        for (const auto& [slice_id, share] : decision.quotas.entries) {
            fields << ' ' << slice_id << '=' << share << "(D=" << decision.rationale.at(slice_id)
                   << ')';
        }
        trace_.add(now, "ric_decision", fields.str());
        log_debug("ric_decision " + fields.str());
    }

    SimTime next = now + epoch_us_;
    if (next < horizon_) {
        queue_.schedule(next, EventKind::RicTick, RicTickPayload{payload.epoch + 1});
    }
}

void Simulation::on_timeout_scan() {
    SimTime now = queue_.now();
    for (const Disconnection& disc : mac_.check_timeouts(now, t_disc_us_)) {
        DeliveryRecord& record = records_[static_cast<std::size_t>(disc.request_id) - 1];
        record.aborted = true;
        std::ostringstream fields;
        fields << disc.request_id << ' ' << disc.ue_id << ' ' << disc.slice_id
               << " undelivered=" << disc.bytes_undelivered << " wasted=" << disc.bytes_wasted;
        trace_.add(now, "disconnect", fields.str());
    }
    SimTime next = now + kTimeoutScanUs;
    if (next < horizon_) {
        queue_.schedule(next, EventKind::TimeoutCheck, TimeoutCheckPayload{});
    }
}

void Simulation::on_horizon_end() {
    trace_.add(queue_.now(), "horizon_end", "");
    for (const SliceId& slice_id : registry_.active_slices()) {
        ControlMessage msg{MsgKind::Release, slice_id, requester_of(descriptor_of(slice_id)),
                           queue_.now(), false};
        trace_.add(queue_.now(), "control_message",
                   std::string(msg_kind_name(msg.kind)) + ' ' + slice_id + ' ' + msg.ue_id);
        trace_state(slice_id, registry_.step(slice_id, msg));
    }
}

void Simulation::dispatch(const Event& event) {
    switch (event.kind) {
        case EventKind::RequestArrival:
            on_request_arrival(std::get<RequestArrivalPayload>(event.payload));
            break;
        case EventKind::TokenReady:
            on_token_ready(std::get<TokenReadyPayload>(event.payload));
            break;
        case EventKind::TtiTick:
            on_tti(std::get<TtiTickPayload>(event.payload));
            break;
        case EventKind::RicTick:
            on_ric(std::get<RicTickPayload>(event.payload));
            break;
        case EventKind::ControlMessage:
            on_control(std::get<ControlMessage>(event.payload));
            break;
        case EventKind::TimeoutCheck:
            on_timeout_scan();
            break;
        case EventKind::HorizonEnd:
            on_horizon_end();
            break;
    }
}

RunResult Simulation::run() {
    totals_.n_prb = scenario_.tti.n_prb;
    setup();

    while (auto event = queue_.pop_next()) {
        try {
            dispatch(*event);
        } catch (const Error& e) {
            std::ostringstream oss;
            oss << "while handling " << event_kind_name(event->kind) << " at t=" << event->time
                << "us: " << e.what();
            throw Error(e.code(), oss.str());
        }
        if (event->kind == EventKind::HorizonEnd) break;
    }

    RunResult result;
    result.mode = scheduler_policy_name(policy_);
    result.master_seed = master_seed_;
    result.trace = std::move(trace_);
    result.records = std::move(records_);
    result.alloc = std::move(totals_);
    result.denied_requests = denied_;
    return result;
}

}  // namespace

SimTime decision_effective_time(SimTime decided_at, SimTime control_delay_us, SimTime tti_us) {
    SimTime landing = decided_at + control_delay_us;
    return (landing / tti_us + 1) * tti_us;
}

SimTime schedule_quota_decision(std::deque<PendingQuota>& pending, const QuotaDecision& decision,
                                const SchedulerMode& mode, SimTime now, SimTime control_delay_us,
                                SimTime tti_us) {
    if (mode.policy != SchedulerPolicy::Dynamic) {
        throw_error(ErrorCode::ModeMismatch,
                    std::string("quota decisions require dynamic mode, scheduler runs ") +
                        scheduler_policy_name(mode.policy));
    }
    SimTime effective = decision_effective_time(now, control_delay_us, tti_us);
    pending.push_back(PendingQuota{effective, decision.quotas});
    return effective;
}

RunResult run_scenario(const Scenario& scenario, std::uint64_t master_seed,
                       SchedulerPolicy policy, bool verbose_trace) {
    validate_for_policy(scenario, policy);
    log_info("run " + scenario.name + " mode=" + scheduler_policy_name(policy) +
             " seed=" + std::to_string(master_seed));
    Simulation simulation(scenario, master_seed, policy, verbose_trace);
    return simulation.run();
}

}  // namespace llmslice
