#include "llmslice/workload.hpp"

#include <algorithm>
#include <cmath>

namespace llmslice {

namespace {

constexpr double kUsPerSecond = 1e6;

}  // namespace

std::vector<SimTime> sample_request_arrivals(const ArrivalProcess& proc, SimTime horizon,
                                             RngStream& rng) {
    std::vector<SimTime> arrivals;
    if (proc.rate_per_s <= 0.0 || horizon <= 0) return arrivals;

    auto push_arrival = [&](double t_us) {
        SimTime t = static_cast<SimTime>(std::llround(t_us));
        if (!arrivals.empty() && t <= arrivals.back()) t = arrivals.back() + 1;  // keep strict order
        if (t < horizon) arrivals.push_back(t);
        return t < horizon;
    };

    if (proc.burst_multiplier <= 1.0) {
        // Degenerate modulator: plain homogeneous Poisson.
        double mean_gap_us = kUsPerSecond / proc.rate_per_s;
        double t = 0.0;
        for (;;) {
            t += rng.exponential(mean_gap_us);
            if (t >= static_cast<double>(horizon)) break;
            if (!push_arrival(t)) break;
        }
        return arrivals;
    }

    // Two-phase MMPP. Phase dwells are exponential; within a phase, arrivals
    // are Poisson at the phase rate. Crossing a phase boundary discards the
    // partial gap and redraws (memorylessness makes this exact).
    bool bursting = false;  // start in the base phase
    double t = 0.0;
    double phase_end = rng.exponential(proc.burst_off_ms * 1000.0);
    while (t < static_cast<double>(horizon)) {
        double rate = proc.rate_per_s * (bursting ? proc.burst_multiplier : 1.0);
        double gap = rng.exponential(kUsPerSecond / rate);
        if (t + gap < phase_end) {
            t += gap;
            if (t >= static_cast<double>(horizon)) break;
            if (!push_arrival(t)) break;
        } else {
            t = phase_end;
            bursting = !bursting;
            double dwell_ms = bursting ? proc.burst_on_ms : proc.burst_off_ms;
            phase_end = t + rng.exponential(dwell_ms * 1000.0);
        }
    }
    return arrivals;
}

TokenStream sample_token_stream(const ServiceProfile& profile, std::int64_t request_id,
                                RngStream& rng) {
    double raw = std::exp(rng.normal(profile.tokens_mu, profile.tokens_sigma));
    std::int64_t n = static_cast<std::int64_t>(std::llround(raw));
    n = std::clamp(n, profile.tokens_min, profile.tokens_max);

    TokenStream stream;
    stream.request_id = request_id;
    stream.n_tokens = n;
    stream.first_token_delay_ms = profile.first_token_delay_ms;
    stream.token_interval_ms = profile.token_interval_ms;
    stream.bytes_per_token = profile.bytes_per_token;
    return stream;
}

std::vector<std::pair<SimTime, std::int64_t>> token_enqueue_schedule(const TokenStream& stream,
                                                                     SimTime t_start) {
    std::vector<std::pair<SimTime, std::int64_t>> entries;
    entries.reserve(static_cast<std::size_t>(stream.n_tokens));
    SimTime first = t_start + ms_to_us(stream.first_token_delay_ms);
    SimTime interval = ms_to_us(stream.token_interval_ms);
    for (std::int64_t k = 0; k < stream.n_tokens; ++k) {
        entries.emplace_back(first + k * interval, stream.bytes_per_token);
    }
    return entries;
}

}  // namespace llmslice
