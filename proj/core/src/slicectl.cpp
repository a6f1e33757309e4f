#include "llmslice/slicectl.hpp"

#include <sstream>

#include "llmslice/errors.hpp"

namespace llmslice {

const char* slice_state_name(SliceState state) {
    switch (state) {
        case SliceState::Requested: return "Requested";
        case SliceState::Registered: return "Registered";
        case SliceState::Checking: return "Checking";
        case SliceState::Active: return "Active";
        case SliceState::Rejected: return "Rejected";
        case SliceState::Released: return "Released";
    }
    return "?";
}

const char* msg_kind_name(MsgKind kind) {
    switch (kind) {
        case MsgKind::SliceRequest: return "SliceRequest";
        case MsgKind::Register: return "Register";
        case MsgKind::PermissionQuery: return "PermissionQuery";
        case MsgKind::PermissionReply: return "PermissionReply";
        case MsgKind::Activate: return "Activate";
        case MsgKind::Reject: return "Reject";
        case MsgKind::Release: return "Release";
    }
    return "?";
}

std::optional<SliceState> try_fsm_step(SliceState state, const ControlMessage& msg) {
    switch (msg.kind) {
        case MsgKind::Register:
            if (state == SliceState::Requested) return SliceState::Registered;
            break;
        case MsgKind::PermissionQuery:
            if (state == SliceState::Registered) return SliceState::Checking;
            break;
        case MsgKind::PermissionReply:
            if (state == SliceState::Checking)
                return msg.ok ? SliceState::Active : SliceState::Rejected;
            break;
        case MsgKind::Release:
            if (state == SliceState::Active) return SliceState::Released;
            break;
        default:
            break;
    }
    return std::nullopt;
}

SliceState fsm_step(SliceState state, const ControlMessage& msg) {
    auto next = try_fsm_step(state, msg);
    if (!next) {
        std::ostringstream oss;
        oss << "slice '" << msg.slice_id << "': " << msg_kind_name(msg.kind)
            << " not valid in state " << slice_state_name(state);
        throw_error(ErrorCode::InvalidTransition, oss.str());
    }
    return *next;
}

void PermissionDb::add(const PermissionRecord& record) {
    auto key = std::make_pair(record.ue_id, record.service_id);
    if (!records_.emplace(key, record).second) {
        throw_error(ErrorCode::DuplicateRecord,
                    "(" + record.ue_id + ", " + record.service_id + ")");
    }
}

bool PermissionDb::authorize(const UeId& ue_id, const ServiceId& service_id) const {
    auto it = records_.find(std::make_pair(ue_id, service_id));
    return it != records_.end() && it->second.allowed;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

}  // namespace

PermissionDb load_permissions(const std::string& text) {
    PermissionDb db;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "ue_id,service_id,allowed,tier") {
                throw_error(ErrorCode::ParseError,
                            "line " + std::to_string(line_no) +
                                ": expected header 'ue_id,service_id,allowed,tier'");
            }
            header_seen = true;
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw_error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                            std::to_string(fields.size()));
        }
        PermissionRecord record;
        record.ue_id = fields[0];
        record.service_id = fields[1];
        if (fields[2] == "true") {
            record.allowed = true;
        } else if (fields[2] == "false") {
            record.allowed = false;
        } else {
            throw_error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": allowed must be true or false, got '" +
                            fields[2] + "'");
        }
        record.tier = fields[3];
        if (record.ue_id.empty() || record.service_id.empty()) {
            throw_error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": empty ue_id or service_id");
        }
        db.add(record);
    }
    return db;
}

void SliceRegistry::request(const SliceDescriptor& desc) {
    if (entries_.count(desc.slice_id) > 0) {
        throw_error(ErrorCode::DuplicateSlice, desc.slice_id);
    }
    entries_.emplace(desc.slice_id, Entry{desc, SliceState::Requested, false});
}

void SliceRegistry::register_slice(const SliceDescriptor& desc) {
    auto it = entries_.find(desc.slice_id);
    if (it == entries_.end()) {
        request(desc);
        it = entries_.find(desc.slice_id);
    } else if (it->second.admitted) {
        throw_error(ErrorCode::DuplicateSlice, desc.slice_id);
    }
    double budget = admitted_min_share() + desc.min_share;
    if (budget > 1.0 + 1e-9) {
        std::ostringstream oss;
        oss << "slice '" << desc.slice_id << "': min_share budget " << budget << " exceeds 1";
        throw_error(ErrorCode::AdmissionRejected, oss.str());
    }
    ControlMessage msg{MsgKind::Register, desc.slice_id, "", 0, false};
    it->second.state = fsm_step(it->second.state, msg);
    it->second.admitted = true;
}

SliceState SliceRegistry::step(const SliceId& slice_id, const ControlMessage& msg) {
    auto it = entries_.find(slice_id);
    if (it == entries_.end()) {
        throw_error(ErrorCode::InvalidTransition, "unknown slice '" + slice_id + "'");
    }
    it->second.state = fsm_step(it->second.state, msg);
    return it->second.state;
}

SliceState SliceRegistry::state(const SliceId& slice_id) const {
    auto it = entries_.find(slice_id);
    if (it == entries_.end()) {
        throw_error(ErrorCode::InvalidTransition, "unknown slice '" + slice_id + "'");
    }
    return it->second.state;
}

const SliceDescriptor& SliceRegistry::descriptor(const SliceId& slice_id) const {
    auto it = entries_.find(slice_id);
    if (it == entries_.end()) {
        throw_error(ErrorCode::InvalidTransition, "unknown slice '" + slice_id + "'");
    }
    return it->second.desc;
}

bool SliceRegistry::contains(const SliceId& slice_id) const {
    return entries_.count(slice_id) > 0;
}

double SliceRegistry::admitted_min_share() const {
    double total = 0.0;
    for (const auto& [id, entry] : entries_) {
        if (!entry.admitted) continue;
        if (entry.state == SliceState::Rejected || entry.state == SliceState::Released) continue;
        total += entry.desc.min_share;
    }
    return total;
}

std::vector<SliceId> SliceRegistry::active_slices() const {
    std::vector<SliceId> ids;
    for (const auto& [id, entry] : entries_) {
        if (entry.state == SliceState::Active) ids.push_back(id);
    }
    return ids;  // std::map iteration is already ascending
}

}  // namespace llmslice
