#include <doctest.h>

#include <cmath>

#include "llmslice/rng.hpp"
#include "llmslice/workload.hpp"

using namespace llmslice;

namespace {

// Independent oracle: mean of clamp(exp(mu + sigma*Z), lo, hi) for standard
// normal Z, by Simpson integration over z in [-10, 10]. The sampler rounds
// to integer tokens, which shifts the mean by well under the 5% tolerance.
double censored_lognormal_mean(double mu, double sigma, double lo, double hi) {
    auto integrand = [&](double z) {
        double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        double value = std::exp(mu + sigma * z);
        if (value < lo) value = lo;
        if (value > hi) value = hi;
        return value * phi;
    };
    const int steps = 200000;  // even
    const double a = -10.0, b = 10.0;
    double h = (b - a) / steps;
    double sum = integrand(a) + integrand(b);
    for (int i = 1; i < steps; ++i) {
        sum += integrand(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("zero rate produces no arrivals") {
    RngStream rng(1, "test/arrivals");
    ArrivalProcess proc;
    proc.rate_per_s = 0.0;
    CHECK(sample_request_arrivals(proc, 1000000000, rng).empty());
}

TEST_CASE("burst_multiplier 1 degenerates to plain Poisson on the same stream") {
    ArrivalProcess proc;
    proc.rate_per_s = 5.0;
    proc.burst_multiplier = 1.0;
    proc.burst_on_ms = 100.0;
    proc.burst_off_ms = 400.0;
    SimTime horizon = 20'000'000;  // 20 s

    RngStream rng(77, "test/poisson");
    auto sampled = sample_request_arrivals(proc, horizon, rng);

    // Plain homogeneous Poisson by hand from an identically-derived stream.
    RngStream reference(77, "test/poisson");
    std::vector<SimTime> expected;
    double t = 0.0;
    for (;;) {
        t += reference.exponential(1e6 / proc.rate_per_s);
        if (t >= static_cast<double>(horizon)) break;
        expected.push_back(static_cast<SimTime>(std::llround(t)));
    }
    CHECK(sampled == expected);
    CHECK(!sampled.empty());
}

TEST_CASE("arrival times are strictly increasing, bursty or not") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RngStream rng(seed, "test/mono");
        ArrivalProcess proc;
        proc.rate_per_s = 50.0;
        proc.burst_multiplier = (seed % 2 == 0) ? 6.0 : 1.0;
        proc.burst_on_ms = 200.0;
        proc.burst_off_ms = 600.0;
        auto arrivals = sample_request_arrivals(proc, 5'000'000, rng);
        for (std::size_t i = 1; i < arrivals.size(); ++i) {
            CHECK(arrivals[i] > arrivals[i - 1]);
        }
        if (!arrivals.empty()) {
            CHECK(arrivals.front() >= 0);
            CHECK(arrivals.back() < 5'000'000);
        }
    }
}

// Statistical oracle: rate 2/s over 1000 s, 100 seeds; the mean count must
// sit within 3 standard errors of 2000 (Poisson variance = mean).
TEST_CASE("homogeneous arrival counts match the Poisson mean") {
    ArrivalProcess proc;
    proc.rate_per_s = 2.0;
    SimTime horizon = 1'000'000'000;

    double total = 0.0;
    const int n_seeds = 100;
    for (int seed = 1; seed <= n_seeds; ++seed) {
        RngStream rng(static_cast<std::uint64_t>(seed), "test/poisson-mean");
        total += static_cast<double>(sample_request_arrivals(proc, horizon, rng).size());
    }
    double mean = total / n_seeds;
    double stderr_mean = std::sqrt(2000.0 / n_seeds);
    CHECK(std::abs(mean - 2000.0) <= 3.0 * stderr_mean);
}

TEST_CASE("bursty process produces more arrivals than its base rate") {
    ArrivalProcess proc;
    proc.rate_per_s = 2.0;
    proc.burst_multiplier = 8.0;
    proc.burst_on_ms = 500.0;
    proc.burst_off_ms = 1500.0;
    SimTime horizon = 1'000'000'000;

    double total = 0.0;
    for (int seed = 1; seed <= 50; ++seed) {
        RngStream rng(static_cast<std::uint64_t>(seed), "test/bursty");
        total += static_cast<double>(sample_request_arrivals(proc, horizon, rng).size());
    }
    // Expected boost: on-fraction 0.25 -> mean rate 2 * (1 + 0.25*7) = 5.5/s.
    double mean = total / 50.0;
    CHECK(mean > 3000.0);
    CHECK(mean < 8000.0);
}

TEST_CASE("sigma 0 pins the token count at exp(mu)") {
    ServiceProfile profile;
    profile.tokens_mu = std::log(100.0);
    profile.tokens_sigma = 0.0;
    profile.tokens_min = 1;
    profile.tokens_max = 4096;
    RngStream rng(5, "test/tokens");
    for (int i = 0; i < 50; ++i) {
        CHECK(sample_token_stream(profile, i, rng).n_tokens == 100);
    }
}

TEST_CASE("token counts always respect the profile bounds") {
    RngStream knob(3, "test/profiles");
    RngStream rng(4, "test/tokens-clamp");
    for (int i = 0; i < 500; ++i) {
        ServiceProfile profile;
        profile.tokens_mu = knob.uniform() * 8.0;
        profile.tokens_sigma = knob.uniform() * 2.0;
        profile.tokens_min = 1 + static_cast<std::int64_t>(knob.uniform_int(50));
        profile.tokens_max = profile.tokens_min + static_cast<std::int64_t>(knob.uniform_int(500));
        TokenStream stream = sample_token_stream(profile, i, rng);
        CHECK(stream.n_tokens >= profile.tokens_min);
        CHECK(stream.n_tokens <= profile.tokens_max);
        CHECK(stream.total_bytes() == stream.n_tokens * profile.bytes_per_token);
    }
}

// Independent numerical-integration oracle for the default response-length
// distribution; 10,000 samples must land within 5% of the integral.
TEST_CASE("truncated-lognormal sample mean matches numerical integration") {
    ServiceProfile profile;  // defaults: mu 5.3, sigma 0.8, bounds [16, 4096]
    double expected = censored_lognormal_mean(profile.tokens_mu, profile.tokens_sigma,
                                              static_cast<double>(profile.tokens_min),
                                              static_cast<double>(profile.tokens_max));
    RngStream rng(2024, "test/lognormal-mean");
    double total = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        total += static_cast<double>(sample_token_stream(profile, i, rng).n_tokens);
    }
    double mean = total / n;
    CHECK(std::abs(mean - expected) / expected < 0.05);
}

TEST_CASE("token schedule arithmetic") {
    TokenStream stream;
    stream.n_tokens = 3;
    stream.first_token_delay_ms = 50.0;
    stream.token_interval_ms = 20.0;
    stream.bytes_per_token = 4;

    auto entries = token_enqueue_schedule(stream, 0);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].first == 50'000);
    CHECK(entries[1].first == 70'000);
    CHECK(entries[2].first == 90'000);

    std::int64_t total = 0;
    for (const auto& [t, bytes] : entries) total += bytes;
    CHECK(total == stream.total_bytes());
}

TEST_CASE("single token lands at first_token_delay") {
    TokenStream stream;
    stream.n_tokens = 1;
    stream.first_token_delay_ms = 200.0;
    stream.token_interval_ms = 20.0;
    stream.bytes_per_token = 8;
    auto entries = token_enqueue_schedule(stream, 1234);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].first == 1234 + 200'000);
    CHECK(entries[0].second == 8);
}
