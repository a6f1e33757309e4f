#include "llmslice/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "llmslice/errors.hpp"

namespace llmslice {

namespace {

using nlohmann::json;

const ServiceId kBackgroundService = "background";

// Strict accessor layer: every object is checked against an allowed key set
// and every fetch names its location on failure.

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw_error(ErrorCode::ParseError, where + " must be an object");
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (allowed.count(key) == 0) {
            throw_error(ErrorCode::UnknownKey, where + ": '" + key + "'");
        }
    }
}

const json& require_key(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw_error(ErrorCode::MissingKey,
                    where.empty() ? "'" + key + "'" : where + ": '" + key + "'");
    }
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw_error(ErrorCode::ParseError, where + " must be a number");
    return j.get<double>();
}

std::int64_t as_integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw_error(ErrorCode::ParseError, where + " must be an integer");
    return j.get<std::int64_t>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw_error(ErrorCode::ParseError, where + " must be a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw_error(ErrorCode::ParseError, where + " must be a boolean");
    return j.get<bool>();
}

double number_or(const json& j, const std::string& key, const std::string& where, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : as_number(*it, where + "." + key);
}

std::int64_t integer_or(const json& j, const std::string& key, const std::string& where,
                        std::int64_t fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : as_integer(*it, where + "." + key);
}

void fail(const std::string& message) { throw_error(ErrorCode::ParseError, message); }

}  // namespace

const ServiceProfile* Scenario::find_service(const ServiceId& service_id) const {
    for (const ServiceProfile& service : services) {
        if (service.service_id == service_id) return &service;
    }
    return nullptr;
}

const SliceDescriptor* Scenario::slice_for_service(const ServiceId& service_id) const {
    for (const SliceDescriptor& slice : slices) {
        if (slice.service_id == service_id) return &slice;
    }
    return nullptr;
}

const UeConfig* Scenario::find_ue(const UeId& ue_id) const {
    for (const UeConfig& ue : ues) {
        if (ue.ue_id == ue_id) return &ue;
    }
    return nullptr;
}

SchedulerPolicy parse_policy(const std::string& name) {
    if (name == "shared") return SchedulerPolicy::Shared;
    if (name == "static") return SchedulerPolicy::Static;
    if (name == "dynamic") return SchedulerPolicy::Dynamic;
    throw_error(ErrorCode::ParseError,
                "mode must be one of shared|static|dynamic, got '" + name + "'");
}

Scenario parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw_error(ErrorCode::ParseError, e.what());
    }
    expect_object(root, "scenario");
    check_keys(root, "scenario",
               {"name", "horizon_ms", "tti", "ues", "services", "slices", "arrivals",
                "background", "mode", "ric", "timeouts", "delays", "seeds", "permissions"});

    Scenario scenario;
    scenario.name = as_string(require_key(root, "name", ""), "name");
    scenario.horizon_ms = as_integer(require_key(root, "horizon_ms", ""), "horizon_ms");
    if (scenario.horizon_ms < 0) fail("horizon_ms must be >= 0");

    if (auto it = root.find("tti"); it != root.end()) {
        expect_object(*it, "tti");
        check_keys(*it, "tti", {"tti_us", "n_prb"});
        scenario.tti.tti_us = integer_or(*it, "tti_us", "tti", 1000);
        scenario.tti.n_prb = static_cast<int>(integer_or(*it, "n_prb", "tti", 100));
    }
    if (scenario.tti.tti_us <= 0) fail("tti.tti_us must be > 0");
    if (scenario.tti.n_prb < 1) fail("tti.n_prb must be >= 1");
    if (ms_to_us(scenario.horizon_ms) % scenario.tti.tti_us != 0) {
        fail("horizon_ms must be an exact multiple of tti_us");
    }

    // --- services ---
    const json& services = require_key(root, "services", "");
    if (!services.is_array()) fail("services must be an array");
    std::set<ServiceId> service_ids;
    for (std::size_t i = 0; i < services.size(); ++i) {
        const json& s = services[i];
        std::string where = "services[" + std::to_string(i) + "]";
        expect_object(s, where);
        check_keys(s, where,
                   {"service_id", "tokens_mu", "tokens_sigma", "tokens_min", "tokens_max",
                    "bytes_per_token", "token_interval_ms", "first_token_delay_ms"});
        ServiceProfile profile;
        profile.service_id = as_string(require_key(s, "service_id", where), where + ".service_id");
        profile.tokens_mu = number_or(s, "tokens_mu", where, profile.tokens_mu);
        profile.tokens_sigma = number_or(s, "tokens_sigma", where, profile.tokens_sigma);
        profile.tokens_min = integer_or(s, "tokens_min", where, profile.tokens_min);
        profile.tokens_max = integer_or(s, "tokens_max", where, profile.tokens_max);
        profile.bytes_per_token = integer_or(s, "bytes_per_token", where, profile.bytes_per_token);
        profile.token_interval_ms = number_or(s, "token_interval_ms", where, profile.token_interval_ms);
        profile.first_token_delay_ms =
            number_or(s, "first_token_delay_ms", where, profile.first_token_delay_ms);

        if (profile.service_id.empty()) fail(where + ": service_id must be non-empty");
        if (profile.service_id == kBackgroundService) {
            fail(where + ": 'background' is reserved for the background slice");
        }
        if (!service_ids.insert(profile.service_id).second) {
            fail(where + ": duplicate service_id '" + profile.service_id + "'");
        }
        if (profile.tokens_min < 1) fail(where + ": tokens_min must be >= 1");
        if (profile.tokens_min > profile.tokens_max) fail(where + ": tokens_min > tokens_max");
        if (profile.bytes_per_token < 1) fail(where + ": bytes_per_token must be >= 1");
        if (profile.token_interval_ms < 0) fail(where + ": token_interval_ms must be >= 0");
        if (profile.first_token_delay_ms < 0) fail(where + ": first_token_delay_ms must be >= 0");
        if (profile.tokens_sigma < 0) fail(where + ": tokens_sigma must be >= 0");
        scenario.services.push_back(profile);
    }

    // --- ues ---
    const json& ues = require_key(root, "ues", "");
    if (!ues.is_array()) fail("ues must be an array");
    if (ues.empty()) fail("ues must be non-empty");
    std::set<UeId> ue_ids;
    for (std::size_t i = 0; i < ues.size(); ++i) {
        const json& u = ues[i];
        std::string where = "ues[" + std::to_string(i) + "]";
        expect_object(u, where);
        check_keys(u, where, {"ue_id", "cqi", "services"});
        UeConfig ue;
        ue.ue_id = as_string(require_key(u, "ue_id", where), where + ".ue_id");
        ue.cqi = static_cast<int>(integer_or(u, "cqi", where, 10));
        if (ue.ue_id.empty()) fail(where + ": ue_id must be non-empty");
        if (!ue_ids.insert(ue.ue_id).second) fail(where + ": duplicate ue_id '" + ue.ue_id + "'");
        if (ue.cqi < 1 || ue.cqi > 15) fail(where + ": cqi must be in 1..15");
        if (auto sit = u.find("services"); sit != u.end()) {
            if (!sit->is_array()) fail(where + ".services must be an array");
            for (const json& sid : *sit) {
                ServiceId service_id = as_string(sid, where + ".services[]");
                if (service_ids.count(service_id) == 0) {
                    throw_error(ErrorCode::CrossRefError,
                                where + ".services: unknown service '" + service_id + "'");
                }
                ue.services.push_back(service_id);
            }
        }
        scenario.ues.push_back(ue);
    }

    // --- slices ---
    if (auto it = root.find("slices"); it != root.end()) {
        if (!it->is_array()) fail("slices must be an array");
        std::set<SliceId> slice_ids;
        std::set<ServiceId> sliced_services;
        double min_sum = 0.0;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& s = (*it)[i];
            std::string where = "slices[" + std::to_string(i) + "]";
            expect_object(s, where);
            check_keys(s, where, {"slice_id", "service_id", "min_share", "max_share", "priority"});
            SliceDescriptor slice;
            slice.slice_id = as_string(require_key(s, "slice_id", where), where + ".slice_id");
            slice.service_id = as_string(require_key(s, "service_id", where), where + ".service_id");
            slice.min_share = number_or(s, "min_share", where, 0.0);
            slice.max_share = number_or(s, "max_share", where, 1.0);
            slice.priority = static_cast<int>(integer_or(s, "priority", where, 0));

            if (slice.slice_id.empty()) fail(where + ": slice_id must be non-empty");
            if (slice.slice_id == "pool") fail(where + ": 'pool' is reserved for shared mode");
            if (!slice_ids.insert(slice.slice_id).second) {
                fail(where + ": duplicate slice_id '" + slice.slice_id + "'");
            }
            if (slice.slice_id == kBackgroundService) {
                if (slice.service_id != kBackgroundService) {
                    fail(where + ": the background slice must have service_id 'background'");
                }
            } else if (slice.service_id == kBackgroundService) {
                fail(where + ": service_id 'background' requires slice_id 'background'");
            } else if (service_ids.count(slice.service_id) == 0) {
                throw_error(ErrorCode::CrossRefError,
                            where + ": unknown service '" + slice.service_id + "'");
            }
            if (!sliced_services.insert(slice.service_id).second) {
                fail(where + ": service '" + slice.service_id + "' already has a slice");
            }
            if (slice.min_share < 0.0 || slice.min_share > slice.max_share ||
                slice.max_share > 1.0) {
                fail(where + ": need 0 <= min_share <= max_share <= 1");
            }
            min_sum += slice.min_share;
            scenario.slices.push_back(slice);
        }
        if (min_sum > 1.0 + 1e-9) fail("slices: min_share values sum above 1");
    }

    // --- arrivals ---
    if (auto it = root.find("arrivals"); it != root.end()) {
        if (!it->is_array()) fail("arrivals must be an array");
        std::set<std::pair<UeId, ServiceId>> seen;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& a = (*it)[i];
            std::string where = "arrivals[" + std::to_string(i) + "]";
            expect_object(a, where);
            check_keys(a, where,
                       {"ue_id", "service_id", "rate_per_s", "burst_multiplier", "burst_on_ms",
                        "burst_off_ms"});
            ArrivalConfig arrival;
            arrival.ue_id = as_string(require_key(a, "ue_id", where), where + ".ue_id");
            arrival.service_id = as_string(require_key(a, "service_id", where), where + ".service_id");
            arrival.process.rate_per_s =
                as_number(require_key(a, "rate_per_s", where), where + ".rate_per_s");
            arrival.process.burst_multiplier = number_or(a, "burst_multiplier", where, 1.0);
            arrival.process.burst_on_ms = number_or(a, "burst_on_ms", where, 1000.0);
            arrival.process.burst_off_ms = number_or(a, "burst_off_ms", where, 4000.0);

            if (ue_ids.count(arrival.ue_id) == 0) {
                throw_error(ErrorCode::CrossRefError, where + ": unknown ue '" + arrival.ue_id + "'");
            }
            if (service_ids.count(arrival.service_id) == 0) {
                throw_error(ErrorCode::CrossRefError,
                            where + ": unknown service '" + arrival.service_id + "'");
            }
            const UeConfig* ue = scenario.find_ue(arrival.ue_id);
            bool subscribed = false;
            for (const ServiceId& sid : ue->services) subscribed |= (sid == arrival.service_id);
            if (!subscribed) {
                throw_error(ErrorCode::CrossRefError,
                            where + ": ue '" + arrival.ue_id + "' does not list service '" +
                                arrival.service_id + "'");
            }
            if (!seen.insert({arrival.ue_id, arrival.service_id}).second) {
                fail(where + ": duplicate (ue_id, service_id) pair");
            }
            if (arrival.process.rate_per_s < 0) fail(where + ": rate_per_s must be >= 0");
            if (arrival.process.burst_multiplier < 1.0) {
                fail(where + ": burst_multiplier must be >= 1");
            }
            if (arrival.process.burst_multiplier > 1.0 &&
                (arrival.process.burst_on_ms <= 0 || arrival.process.burst_off_ms <= 0)) {
                fail(where + ": burst dwell times must be > 0 when burst_multiplier > 1");
            }
            scenario.arrivals.push_back(arrival);
        }
    }

    // --- background ---
    if (auto it = root.find("background"); it != root.end()) {
        if (!it->is_array()) fail("background must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& b = (*it)[i];
            std::string where = "background[" + std::to_string(i) + "]";
            expect_object(b, where);
            check_keys(b, where, {"ue_id", "rate_bytes_per_s", "packet_bytes"});
            BackgroundFlow flow;
            flow.ue_id = as_string(require_key(b, "ue_id", where), where + ".ue_id");
            flow.rate_bytes_per_s =
                as_number(require_key(b, "rate_bytes_per_s", where), where + ".rate_bytes_per_s");
            flow.packet_bytes = integer_or(b, "packet_bytes", where, 1500);
            if (ue_ids.count(flow.ue_id) == 0) {
                throw_error(ErrorCode::CrossRefError, where + ": unknown ue '" + flow.ue_id + "'");
            }
            if (flow.rate_bytes_per_s < 0) fail(where + ": rate_bytes_per_s must be >= 0");
            if (flow.packet_bytes < 1) fail(where + ": packet_bytes must be >= 1");
            scenario.background.push_back(flow);
        }
    }

    // --- mode ---
    const json& mode = require_key(root, "mode", "");
    expect_object(mode, "mode");
    check_keys(mode, "mode", {"kind", "work_conserving"});
    scenario.mode = parse_policy(as_string(require_key(mode, "kind", "mode"), "mode.kind"));
    if (auto it = mode.find("work_conserving"); it != mode.end()) {
        scenario.work_conserving = as_bool(*it, "mode.work_conserving");
    }

    // --- ric ---
    if (auto it = root.find("ric"); it != root.end()) {
        expect_object(*it, "ric");
        check_keys(*it, "ric", {"epoch_ms", "alpha"});
        RicConfig ric;
        ric.epoch_ms = number_or(*it, "epoch_ms", "ric", 100.0);
        ric.alpha = number_or(*it, "alpha", "ric", 0.2);
        if (ric.epoch_ms <= 0) fail("ric.epoch_ms must be > 0");
        if (ms_to_us(ric.epoch_ms) % scenario.tti.tti_us != 0) {
            fail("ric.epoch_ms must be an exact multiple of tti_us");
        }
        if (ric.alpha <= 0.0 || ric.alpha > 1.0) fail("ric.alpha must be in (0, 1]");
        scenario.ric = ric;
    }

    // --- timeouts / delays ---
    if (auto it = root.find("timeouts"); it != root.end()) {
        expect_object(*it, "timeouts");
        check_keys(*it, "timeouts", {"t_disc_ms"});
        scenario.timeouts.t_disc_ms = number_or(*it, "t_disc_ms", "timeouts", 2000.0);
    }
    if (scenario.timeouts.t_disc_ms <= 0) fail("timeouts.t_disc_ms must be > 0");
    if (auto it = root.find("delays"); it != root.end()) {
        expect_object(*it, "delays");
        check_keys(*it, "delays", {"control_delay_ms", "uplink_delay_ms"});
        scenario.delays.control_delay_ms = number_or(*it, "control_delay_ms", "delays", 5.0);
        scenario.delays.uplink_delay_ms = number_or(*it, "uplink_delay_ms", "delays", 10.0);
    }
    if (scenario.delays.control_delay_ms < 0 || scenario.delays.uplink_delay_ms < 0) {
        fail("delays must be >= 0");
    }

    // --- seeds ---
    if (auto it = root.find("seeds"); it != root.end()) {
        if (!it->is_array()) fail("seeds must be an array");
        for (const json& seed : *it) {
            std::int64_t value = as_integer(seed, "seeds[]");
            if (value < 0) fail("seeds must be >= 0");
            scenario.seeds.push_back(static_cast<std::uint64_t>(value));
        }
    }
    if (scenario.seeds.empty()) scenario.seeds.push_back(1);

    // --- permissions (path only; loaded by load_scenario_file) ---
    if (auto it = root.find("permissions"); it != root.end()) {
        scenario.permissions_path = as_string(*it, "permissions");
    }

    validate_for_policy(scenario, scenario.mode);
    return scenario;
}

void validate_for_policy(const Scenario& scenario, SchedulerPolicy policy) {
    if (policy == SchedulerPolicy::Shared) return;

    if (policy == SchedulerPolicy::Dynamic && !scenario.ric) {
        throw_error(ErrorCode::MissingKey, "'ric' (required for dynamic mode)");
    }

    // Every service that receives traffic needs a slice to ride on.
    for (const ArrivalConfig& arrival : scenario.arrivals) {
        if (arrival.process.rate_per_s <= 0) continue;
        if (scenario.slice_for_service(arrival.service_id) == nullptr) {
            throw_error(ErrorCode::CrossRefError,
                        "no slice for service '" + arrival.service_id + "' in sliced mode");
        }
    }
    bool any_background = false;
    for (const BackgroundFlow& flow : scenario.background) {
        any_background |= flow.rate_bytes_per_s > 0;
    }
    if (any_background && scenario.slice_for_service(kBackgroundService) == nullptr) {
        throw_error(ErrorCode::CrossRefError,
                    "background flows need a 'background' slice in sliced mode");
    }
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_error(ErrorCode::ParseError, "cannot read scenario file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    Scenario scenario = parse_scenario(buffer.str());

    if (scenario.permissions_path) {
        std::filesystem::path perm_path(*scenario.permissions_path);
        if (perm_path.is_relative()) perm_path = path.parent_path() / perm_path;
        std::ifstream perm_in(perm_path, std::ios::binary);
        if (!perm_in) {
            throw_error(ErrorCode::ParseError,
                        "cannot read permissions file " + perm_path.string());
        }
        std::ostringstream perm_buffer;
        perm_buffer << perm_in.rdbuf();
        scenario.permissions = load_permissions(perm_buffer.str());
    }
    return scenario;
}

}  // namespace llmslice
