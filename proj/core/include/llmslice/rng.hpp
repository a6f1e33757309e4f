#pragma once
#include <cstdint>
#include <string>
#include <string_view>

namespace llmslice {

// Named random stream derived from (master_seed, name). The same pair always
// yields the same sequence, and distinct names give independent streams, so
// adding a draw in one module never perturbs another module's sequence.
//
// Distributions are sampled from raw 64-bit draws with fixed arithmetic
// (no std::*_distribution) so sequences are identical across toolchains.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::string_view name);

    const std::string& name() const { return name_; }

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double uniform();

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n);

    // Exponential with the given mean (inverse-CDF of a uniform draw).
    double exponential(double mean);

    // One normal deviate per call, two uniform draws consumed (Box-Muller).
    double normal(double mu, double sigma);

private:
    std::string name_;
    std::uint64_t state_;
};

}  // namespace llmslice
