#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "llmslice/mac.hpp"
#include "llmslice/radio.hpp"
#include "llmslice/slicectl.hpp"
#include "llmslice/workload.hpp"

namespace llmslice {

struct UeConfig {
    UeId ue_id;
    int cqi = 10;
    std::vector<ServiceId> services;
};

struct ArrivalConfig {
    UeId ue_id;
    ServiceId service_id;
    ArrivalProcess process;
};

struct RicConfig {
    double epoch_ms = 100.0;
    double alpha = 0.2;
};

struct TimeoutConfig {
    double t_disc_ms = 2000.0;  // head-of-line wait beyond this aborts the stream
};

struct DelayConfig {
    double control_delay_ms = 5.0;  // per control-plane hop
    double uplink_delay_ms = 10.0;  // request upload before the LLM starts
};

// Full run configuration. Parsed strictly: unknown keys are rejected so
// experiment typos fail loudly instead of silently using defaults.
struct Scenario {
    std::string name;
    std::int64_t horizon_ms = 0;
    TtiConfig tti;
    std::vector<UeConfig> ues;
    std::vector<ServiceProfile> services;
    std::vector<SliceDescriptor> slices;
    std::vector<ArrivalConfig> arrivals;
    std::vector<BackgroundFlow> background;
    SchedulerPolicy mode = SchedulerPolicy::Shared;
    std::optional<bool> work_conserving;  // default: on for dynamic, off otherwise
    std::optional<RicConfig> ric;         // required when running dynamic
    TimeoutConfig timeouts;
    DelayConfig delays;
    std::vector<std::uint64_t> seeds;
    std::optional<std::string> permissions_path;  // resolved against the scenario file
    PermissionDb permissions;

    SimTime horizon_us() const { return ms_to_us(horizon_ms); }

    SchedulerMode effective_mode(SchedulerPolicy policy) const {
        return SchedulerMode{policy,
                             work_conserving.value_or(policy == SchedulerPolicy::Dynamic)};
    }

    const ServiceProfile* find_service(const ServiceId& service_id) const;
    const SliceDescriptor* slice_for_service(const ServiceId& service_id) const;
    const UeConfig* find_ue(const UeId& ue_id) const;
};

SchedulerPolicy parse_policy(const std::string& name);

// Strict parse + mode-independent validation; also validates against the
// scenario's own declared mode. Does not touch the filesystem.
Scenario parse_scenario(const std::string& text);

// parse_scenario plus permissions loading, relative to the scenario file.
Scenario load_scenario_file(const std::filesystem::path& path);

// Checks the constraints that depend on which policy actually runs
// (e.g. dynamic needs a ric section, static needs max_shares to fit).
void validate_for_policy(const Scenario& scenario, SchedulerPolicy policy);

}  // namespace llmslice
