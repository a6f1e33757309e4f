#pragma once
#include <cstdint>
#include <map>

#include "llmslice/slicectl.hpp"
#include "llmslice/time.hpp"

namespace llmslice {

struct TtiConfig {
    SimTime tti_us = 1000;  // scheduler time step
    int n_prb = 100;        // PRBs per TTI
};

struct LinkState {
    UeId ue_id;
    int cqi = 10;  // 1..15, static per UE per run
};

using LinkMap = std::map<UeId, LinkState>;

// Per-PRB payload for one TTI. The rate map is deliberately linear
// (12 bytes per CQI step) so every allocation is hand-checkable.
std::int64_t bytes_per_prb(int cqi);

// n_prb * bytes_per_prb(cqi).
std::int64_t tti_capacity(int n_prb, int cqi);

// TTIs needed to drain payload_bytes at the given grant, by ceiling division.
std::int64_t drain_ttis(std::int64_t payload_bytes, int n_prb, int cqi);

}  // namespace llmslice
