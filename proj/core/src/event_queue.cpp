#include "llmslice/event_queue.hpp"

#include <string>

#include "llmslice/errors.hpp"

namespace llmslice {

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::RequestArrival: return "request_arrival";
        case EventKind::TokenReady: return "token_ready";
        case EventKind::TtiTick: return "tti_tick";
        case EventKind::RicTick: return "ric_tick";
        case EventKind::ControlMessage: return "control_message";
        case EventKind::TimeoutCheck: return "timeout_check";
        case EventKind::HorizonEnd: return "horizon_end";
    }
    return "?";
}

EventId EventQueue::schedule(SimTime time, EventKind kind, EventPayload payload) {
    if (time < clock_) {
        throw_error(ErrorCode::PastTime,
                    std::string(event_kind_name(kind)) + " at t=" + std::to_string(time) +
                        "us with clock at " + std::to_string(clock_) + "us");
    }
    EventId id = next_seq_++;
    heap_.push(Event{time, id, kind, std::move(payload)});
    return id;
}

std::optional<Event> EventQueue::pop_next() {
    if (heap_.empty()) return std::nullopt;
    Event event = heap_.top();
    heap_.pop();
    clock_ = event.time;
    return event;
}

}  // namespace llmslice
