#pragma once
#include <cstdint>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

#include "llmslice/slicectl.hpp"
#include "llmslice/time.hpp"

namespace llmslice {

enum class EventKind {
    RequestArrival,
    TokenReady,
    TtiTick,
    RicTick,
    ControlMessage,
    TimeoutCheck,
    HorizonEnd,
};

const char* event_kind_name(EventKind kind);

struct RequestArrivalPayload {
    std::int64_t arrival_index = 0;  // into the pre-generated arrival table
};

struct TokenReadyPayload {
    std::int64_t request_id = 0;
    int token_index = 0;
    std::int64_t bytes = 0;
};

struct TtiTickPayload {
    std::int64_t tti_index = 0;
};

struct RicTickPayload {
    std::int64_t epoch = 0;
};

struct TimeoutCheckPayload {};
struct HorizonEndPayload {};

using EventPayload = std::variant<RequestArrivalPayload, TokenReadyPayload, TtiTickPayload,
                                  RicTickPayload, ControlMessage, TimeoutCheckPayload,
                                  HorizonEndPayload>;

using EventId = std::uint64_t;

struct Event {
    SimTime time = 0;
    EventId seq = 0;  // insertion counter, unique per run
    EventKind kind = EventKind::HorizonEnd;
    EventPayload payload;
};

// Min-heap on (time, seq): earliest time first, insertion order on ties.
// Popping advances the clock; scheduling into the past is a logic bug and
// throws PastTime.
class EventQueue {
public:
    SimTime now() const { return clock_; }
    std::size_t size() const { return heap_.size(); }
    bool empty() const { return heap_.empty(); }

    EventId schedule(SimTime time, EventKind kind, EventPayload payload);

    std::optional<Event> pop_next();

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    SimTime clock_ = 0;
    EventId next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

}  // namespace llmslice
