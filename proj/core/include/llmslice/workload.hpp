#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "llmslice/rng.hpp"
#include "llmslice/slicectl.hpp"
#include "llmslice/time.hpp"

namespace llmslice {

// How one LLM service answers: response length is truncated-lognormal
// (heavy-tailed), tokens stream out at a fixed cadence after a model
// compute delay. All values are scenario knobs, not protocol constants.
struct ServiceProfile {
    ServiceId service_id;
    double tokens_mu = 5.3;     // lognormal location of response token count
    double tokens_sigma = 0.8;  // lognormal scale
    std::int64_t tokens_min = 16;
    std::int64_t tokens_max = 4096;
    std::int64_t bytes_per_token = 4;
    double token_interval_ms = 20.0;      // inter-token generation gap
    double first_token_delay_ms = 200.0;  // model compute before first token
};

// Markov-modulated Poisson arrivals: a two-state on/off phase modulates the
// base rate by burst_multiplier, producing traffic peaks with two knobs.
struct ArrivalProcess {
    double rate_per_s = 0.0;
    double burst_multiplier = 1.0;  // >= 1
    double burst_on_ms = 1000.0;    // mean dwell in the boosted phase
    double burst_off_ms = 4000.0;   // mean dwell in the base phase
};

struct LlmRequest {
    std::int64_t request_id = 0;
    UeId ue_id;
    ServiceId service_id;
    SimTime t_arrival = 0;
    std::int64_t prompt_bytes = 0;
};

// One LLM response as a timed sequence of fixed-size token payloads.
struct TokenStream {
    std::int64_t request_id = 0;
    std::int64_t n_tokens = 0;
    double first_token_delay_ms = 0.0;
    double token_interval_ms = 0.0;
    std::int64_t bytes_per_token = 0;

    std::int64_t total_bytes() const { return n_tokens * bytes_per_token; }
};

// Constant-bit-rate filler so slicing has something to contend with.
struct BackgroundFlow {
    UeId ue_id;
    double rate_bytes_per_s = 0.0;
    std::int64_t packet_bytes = 1500;  // enqueue granularity
};

// Arrival times over [0, horizon), strictly increasing. With
// burst_multiplier == 1 this consumes exactly one exponential draw per
// arrival, i.e. it is bit-identical to a plain homogeneous Poisson process.
std::vector<SimTime> sample_request_arrivals(const ArrivalProcess& proc, SimTime horizon,
                                             RngStream& rng);

// Draws n_tokens = round(exp(N(mu, sigma))) clamped into
// [tokens_min, tokens_max]; the remaining fields copy from the profile.
TokenStream sample_token_stream(const ServiceProfile& profile, std::int64_t request_id,
                                RngStream& rng);

// Entry k lands at t_start + first_token_delay + k * token_interval and
// carries bytes_per_token. Exactly n_tokens entries.
std::vector<std::pair<SimTime, std::int64_t>> token_enqueue_schedule(const TokenStream& stream,
                                                                     SimTime t_start);

}  // namespace llmslice
