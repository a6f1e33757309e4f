#pragma once
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llmslice/time.hpp"

namespace llmslice {

using SliceId = std::string;
using UeId = std::string;
using ServiceId = std::string;

// Lifecycle of one slice. Terminal states: Rejected, Released.
enum class SliceState { Requested, Registered, Checking, Active, Rejected, Released };

const char* slice_state_name(SliceState state);

enum class MsgKind {
    SliceRequest,     // UE -> gNB: ask for an LLM-service slice
    Register,         // gNB -> slice manager: admit the slice
    PermissionQuery,  // gNB -> core: is this (ue, service) allowed?
    PermissionReply,  // core -> gNB: ok/deny (carries `ok`)
    Activate,         // gNB -> UE: slice is live (notification only)
    Reject,           // gNB -> UE: denied (notification only)
    Release,          // teardown at end of run
};

const char* msg_kind_name(MsgKind kind);

struct ControlMessage {
    MsgKind kind;
    SliceId slice_id;
    UeId ue_id;
    SimTime t_sent = 0;
    bool ok = false;  // meaningful for PermissionReply only
};

// Single-step transition table. Everything not listed is invalid:
//   Requested  + Register              -> Registered
//   Registered + PermissionQuery       -> Checking
//   Checking   + PermissionReply(ok)   -> Active
//   Checking   + PermissionReply(deny) -> Rejected
//   Active     + Release               -> Released
SliceState fsm_step(SliceState state, const ControlMessage& msg);

// Lenient variant: nullopt instead of InvalidTransition.
std::optional<SliceState> try_fsm_step(SliceState state, const ControlMessage& msg);

struct PermissionRecord {
    UeId ue_id;
    ServiceId service_id;
    bool allowed = false;
    std::string tier;  // informational, e.g. "standard", "premium"
};

class PermissionDb {
public:
    // DuplicateRecord if (ue_id, service_id) already present.
    void add(const PermissionRecord& record);

    // Default-deny: true only for a present record with allowed=true.
    bool authorize(const UeId& ue_id, const ServiceId& service_id) const;

    std::size_t size() const { return records_.size(); }

private:
    std::map<std::pair<UeId, ServiceId>, PermissionRecord> records_;
};

// Parses the permissions CSV: header `ue_id,service_id,allowed,tier`,
// `allowed` in {true,false}, `#` starts a comment line.
PermissionDb load_permissions(const std::string& text);

struct SliceDescriptor {
    SliceId slice_id;
    ServiceId service_id;
    double min_share = 0.0;  // quota bounds, fractions of the PRB grid
    double max_share = 1.0;
    int priority = 0;  // display tie-breaking only
};

// Tracks descriptors and lifecycle state; admission control keeps the sum of
// admitted min_shares at or below 1 so minimum guarantees stay honorable.
class SliceRegistry {
public:
    // Creates the slice in Requested state (SliceRequest received).
    void request(const SliceDescriptor& desc);

    // Admission check plus Requested -> Registered. Creates the entry if
    // request() was not called first. The slice_id acts as the handle for
    // step()/state() afterwards.
    void register_slice(const SliceDescriptor& desc);

    // Strict FSM step; InvalidTransition aborts the caller.
    SliceState step(const SliceId& slice_id, const ControlMessage& msg);

    SliceState state(const SliceId& slice_id) const;
    const SliceDescriptor& descriptor(const SliceId& slice_id) const;
    bool contains(const SliceId& slice_id) const;

    // Admitted, non-terminal min_share total (Registered/Checking/Active).
    double admitted_min_share() const;

    std::vector<SliceId> active_slices() const;  // ascending slice_id

private:
    struct Entry {
        SliceDescriptor desc;
        SliceState state;
        bool admitted = false;
    };
    std::map<SliceId, Entry> entries_;
};

}  // namespace llmslice
