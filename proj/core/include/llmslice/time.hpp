#pragma once
#include <cmath>
#include <cstdint>

namespace llmslice {

// Simulation clock in integer microseconds since run start. Integer time
// keeps event ordering and tie-breaking exact across platforms.
using SimTime = std::int64_t;

constexpr SimTime kUsPerMs = 1000;

constexpr SimTime ms_to_us(std::int64_t ms) { return ms * kUsPerMs; }

inline SimTime ms_to_us(double ms) {
    return static_cast<SimTime>(std::llround(ms * 1000.0));
}

inline double us_to_ms(SimTime us) { return static_cast<double>(us) / 1000.0; }

}  // namespace llmslice
