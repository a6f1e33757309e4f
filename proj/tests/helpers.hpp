#pragma once
#include <string>
#include <vector>

#include "llmslice/scenario.hpp"

namespace llmslice::testing {

// One UE, one service, shared mode, deterministic chunky responses.
// Building blocks for engine-level tests; tweak fields as needed.
inline Scenario base_scenario() {
    Scenario scenario;
    scenario.name = "test";
    scenario.horizon_ms = 2000;
    scenario.tti = TtiConfig{1000, 100};
    scenario.mode = SchedulerPolicy::Shared;

    UeConfig ue;
    ue.ue_id = "ue1";
    ue.cqi = 10;
    ue.services = {"svc"};
    scenario.ues.push_back(ue);

    ServiceProfile service;
    service.service_id = "svc";
    service.tokens_mu = 0.0;
    service.tokens_sigma = 0.0;
    service.tokens_min = 1;
    service.tokens_max = 1;
    service.bytes_per_token = 100;
    service.token_interval_ms = 0.0;
    service.first_token_delay_ms = 50.0;
    scenario.services.push_back(service);

    ArrivalConfig arrival;
    arrival.ue_id = "ue1";
    arrival.service_id = "svc";
    arrival.process.rate_per_s = 1.0;
    scenario.arrivals.push_back(arrival);

    scenario.delays.control_delay_ms = 5.0;
    scenario.delays.uplink_delay_ms = 10.0;
    return scenario;
}

inline void grant_all_permissions(Scenario& scenario) {
    for (const UeConfig& ue : scenario.ues) {
        for (const ServiceId& service_id : ue.services) {
            scenario.permissions.add(PermissionRecord{ue.ue_id, service_id, true, "standard"});
        }
        for (const BackgroundFlow& flow : scenario.background) {
            if (flow.ue_id == ue.ue_id) {
                scenario.permissions.add(PermissionRecord{ue.ue_id, "background", true, "standard"});
                break;
            }
        }
    }
}

inline SliceDescriptor make_slice(const std::string& slice_id, const std::string& service_id,
                                  double min_share, double max_share) {
    SliceDescriptor slice;
    slice.slice_id = slice_id;
    slice.service_id = service_id;
    slice.min_share = min_share;
    slice.max_share = max_share;
    return slice;
}

}  // namespace llmslice::testing
