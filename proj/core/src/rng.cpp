#include "llmslice/rng.hpp"

#include <cmath>

namespace llmslice {

namespace {

// FNV-1a 64-bit over the stream name.
std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view name)
    : name_(name), state_(mix64(master_seed ^ mix64(fnv1a(name)))) {}

std::uint64_t RngStream::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    // multiply-shift; bias is < 1/2^64, irrelevant at simulation scale
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RngStream::exponential(double mean) {
    return -mean * std::log(1.0 - uniform());
}

double RngStream::normal(double mu, double sigma) {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * radius * std::cos(2.0 * M_PI * u2);
}

}  // namespace llmslice
