#include "llmslice/radio.hpp"

#include <string>

#include "llmslice/errors.hpp"

namespace llmslice {

std::int64_t bytes_per_prb(int cqi) {
    if (cqi < 1 || cqi > 15) {
        throw_error(ErrorCode::InvalidCqi, "cqi " + std::to_string(cqi) + " outside 1..15");
    }
    return 12LL * cqi;
}

std::int64_t tti_capacity(int n_prb, int cqi) {
    return static_cast<std::int64_t>(n_prb) * bytes_per_prb(cqi);
}

std::int64_t drain_ttis(std::int64_t payload_bytes, int n_prb, int cqi) {
    std::int64_t capacity = tti_capacity(n_prb, cqi);
    if (payload_bytes <= 0) return 0;
    return (payload_bytes + capacity - 1) / capacity;
}

}  // namespace llmslice
