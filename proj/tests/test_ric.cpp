#include <doctest.h>

#include <cmath>

#include "llmslice/errors.hpp"
#include "llmslice/mac.hpp"
#include "llmslice/ric.hpp"
#include "llmslice/rng.hpp"
#include "llmslice/sim.hpp"

using namespace llmslice;

namespace {

// Independent brute-force fixed point: recompute every share from scratch
// each round, clamp all violators of one kind per round (minima first),
// repeat until stable. Structured deliberately unlike allocate_shares.
std::map<SliceId, double> oracle_allocate(std::map<SliceId, double> demand,
                                          const std::map<SliceId, SliceBounds>& bounds) {
    double demand_sum = 0.0;
    for (auto& [id, d] : demand) demand_sum += d;
    if (demand_sum <= 0.0) {
        for (auto& [id, d] : demand) d = 1.0;
    }

    std::map<SliceId, double> pinned;
    for (;;) {
        double budget = 1.0;
        double pool = 0.0;
        for (const auto& [id, d] : demand) {
            if (pinned.count(id)) {
                budget -= pinned.at(id);
            } else {
                pool += d;
            }
        }
        std::map<SliceId, double> shares;
        for (const auto& [id, d] : demand) {
            if (!pinned.count(id)) shares[id] = pool > 0.0 ? budget * d / pool : 0.0;
        }
        std::vector<SliceId> low, high;
        for (const auto& [id, share] : shares) {
            if (share < bounds.at(id).min_share - 1e-12) low.push_back(id);
        }
        if (!low.empty()) {
            for (const SliceId& id : low) pinned[id] = bounds.at(id).min_share;
            continue;
        }
        for (const auto& [id, share] : shares) {
            if (share > bounds.at(id).max_share + 1e-12) high.push_back(id);
        }
        if (!high.empty()) {
            for (const SliceId& id : high) pinned[id] = bounds.at(id).max_share;
            continue;
        }
        for (const auto& [id, share] : shares) pinned[id] = share;
        return pinned;
    }
}

KpiReport report_with_backlog(const SliceId& slice_id, std::int64_t backlog) {
    KpiReport report;
    report.slice_id = slice_id;
    report.backlog_bytes = backlog;
    return report;
}

}  // namespace

TEST_CASE("ewma seeds on the first observation") {
    EwmaEstimator est;
    est.alpha = 0.2;
    est = ewma_update(est, 100.0);
    CHECK(est.initialized);
    CHECK(est.value == 100.0);
}

TEST_CASE("ewma blends with alpha") {
    EwmaEstimator est{0.2, 100.0, true};
    est = ewma_update(est, 200.0);
    CHECK(est.value == doctest::Approx(120.0));
}

TEST_CASE("alpha 1 tracks the last observation exactly") {
    EwmaEstimator est{1.0, 0.0, false};
    for (double x : {5.0, 80.0, 3.25}) {
        est = ewma_update(est, x);
        CHECK(est.value == x);
    }
}

// Closed-form recursion oracle at 1e-12 relative tolerance.
TEST_CASE("ewma matches the closed form over long sequences") {
    const double alpha = 0.37;
    RngStream rng(5150, "ric/ewma");
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(rng.uniform() * 1e6);

    EwmaEstimator est{alpha, 0.0, false};
    for (double x : xs) est = ewma_update(est, x);

    double expected = xs[0];
    for (std::size_t k = 1; k < xs.size(); ++k) {
        expected = alpha * xs[k] + (1.0 - alpha) * expected;
    }
    CHECK(std::abs(est.value - expected) <= 1e-12 * std::abs(expected));
}

TEST_CASE("proportional split inside bounds") {
    std::map<SliceId, double> demand = {{"A", 300'000.0}, {"B", 100'000.0}};
    std::map<SliceId, SliceBounds> bounds = {{"A", {0.1, 0.9}}, {"B", {0.1, 0.9}}};
    QuotaVector quota = allocate_shares(demand, bounds);
    CHECK(quota.entries["A"] == doctest::Approx(0.75));
    CHECK(quota.entries["B"] == doctest::Approx(0.25));
}

TEST_CASE("clamping caps the hot slice and floors the cold one") {
    std::map<SliceId, double> demand = {{"A", 990'000.0}, {"B", 10'000.0}};
    std::map<SliceId, SliceBounds> bounds = {{"A", {0.2, 0.8}}, {"B", {0.2, 0.8}}};
    QuotaVector quota = allocate_shares(demand, bounds);
    CHECK(quota.entries["A"] == doctest::Approx(0.8));
    CHECK(quota.entries["B"] == doctest::Approx(0.2));
}

TEST_CASE("zero demand splits equally subject to bounds") {
    std::map<SliceId, double> demand = {{"A", 0.0}, {"B", 0.0}};
    std::map<SliceId, SliceBounds> bounds = {{"A", {0.1, 0.9}}, {"B", {0.1, 0.9}}};
    QuotaVector quota = allocate_shares(demand, bounds);
    CHECK(quota.entries["A"] == doctest::Approx(0.5));
    CHECK(quota.entries["B"] == doctest::Approx(0.5));
}

TEST_CASE("infeasible minima are rejected") {
    std::map<SliceId, double> demand = {{"A", 1.0}, {"B", 1.0}};
    std::map<SliceId, SliceBounds> bounds = {{"A", {0.7, 0.9}}, {"B", {0.6, 0.9}}};
    CHECK_THROWS_WITH_AS(allocate_shares(demand, bounds), doctest::Contains("InfeasibleBounds"),
                         Error);
}

TEST_CASE("allocate_shares matches the brute-force fixed point on 1000 random instances") {
    RngStream rng(777, "ric/fuzz");
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_int(6));
        std::map<SliceId, double> demand;
        std::map<SliceId, SliceBounds> bounds;
        double min_left = 1.0;
        for (int i = 0; i < n; ++i) {
            SliceId id = "s" + std::to_string(i);
            demand[id] = rng.uniform() < 0.15 ? 0.0 : rng.uniform() * 1e6;
            double min_share = rng.uniform() * min_left * 0.9;
            min_left -= min_share;
            double max_share = min_share + rng.uniform() * (1.0 - min_share);
            bounds[id] = SliceBounds{min_share, max_share};
        }

        QuotaVector quota = allocate_shares(demand, bounds);
        auto expected = oracle_allocate(demand, bounds);

        double total = 0.0;
        for (const auto& [id, share] : quota.entries) {
            CHECK(share >= bounds[id].min_share - 1e-9);
            CHECK(share <= bounds[id].max_share + 1e-9);
            CHECK(share == doctest::Approx(expected[id]).epsilon(1e-9));
            total += share;
        }
        CHECK(total <= 1.0 + 1e-9);
    }
}

TEST_CASE("monotone demand response with non-binding bounds") {
    RngStream rng(888, "ric/monotone");
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_int(5));
        std::map<SliceId, double> demand;
        std::map<SliceId, SliceBounds> bounds;
        for (int i = 0; i < n; ++i) {
            SliceId id = "s" + std::to_string(i);
            demand[id] = 1.0 + rng.uniform() * 1e6;
            bounds[id] = SliceBounds{0.0, 1.0};
        }
        QuotaVector before = allocate_shares(demand, bounds);
        SliceId bumped = "s" + std::to_string(rng.uniform_int(n));
        demand[bumped] *= 1.5;
        QuotaVector after = allocate_shares(demand, bounds);
        CHECK(after.entries[bumped] >= before.entries[bumped] - 1e-12);
    }
}

TEST_CASE("quota vector is invariant under demand rescaling") {
    std::map<SliceId, double> demand = {{"A", 123.0}, {"B", 456.0}, {"C", 789.0}};
    std::map<SliceId, SliceBounds> bounds = {
        {"A", {0.05, 0.9}}, {"B", {0.05, 0.9}}, {"C", {0.05, 0.9}}};
    QuotaVector base = allocate_shares(demand, bounds);
    for (double scale : {1e-3, 7.0, 1e6}) {
        std::map<SliceId, double> scaled;
        for (const auto& [id, d] : demand) scaled[id] = d * scale;
        QuotaVector quota = allocate_shares(scaled, bounds);
        for (const auto& [id, share] : base.entries) {
            CHECK(quota.entries[id] == doctest::Approx(share).epsilon(1e-12));
        }
    }
}

TEST_CASE("controller quotas converge under stationary load") {
    const double alpha = 0.2;
    RicController controller(alpha);
    std::map<SliceId, SliceBounds> bounds = {{"A", {0.1, 0.9}}, {"B", {0.1, 0.9}}};

    auto make_reports = [] {
        KpiReport a, b;
        a.slice_id = "A";
        a.arrived_bytes = 600'000;
        b.slice_id = "B";
        b.arrived_bytes = 200'000;
        return std::vector<KpiReport>{a, b};
    };

    QuotaVector previous;
    double last_delta = 1.0;
    int epochs = static_cast<int>(50.0 / alpha);
    for (int epoch = 1; epoch <= epochs + 10; ++epoch) {
        QuotaDecision decision = controller.compute_quotas(make_reports(), bounds, epoch);
        if (epoch > 1) {
            last_delta = 0.0;
            for (const auto& [id, share] : decision.quotas.entries) {
                last_delta = std::max(last_delta, std::abs(share - previous.entries[id]));
            }
        }
        previous = decision.quotas;
        if (epoch > epochs) CHECK(last_delta < 1e-6);
    }
    // Stationary 3:1 arrivals settle on a 3:1 split.
    CHECK(previous.entries["A"] == doctest::Approx(0.75).epsilon(1e-3));
}

TEST_CASE("controller demand is backlog plus smoothed arrivals") {
    RicController controller(0.5);
    std::map<SliceId, SliceBounds> bounds = {{"A", {0.0, 1.0}}, {"B", {0.0, 1.0}}};

    KpiReport a = report_with_backlog("A", 1000);
    a.arrived_bytes = 400;
    KpiReport b = report_with_backlog("B", 0);
    b.arrived_bytes = 600;

    QuotaDecision decision = controller.compute_quotas({a, b}, bounds, 1);
    CHECK(decision.rationale["A"] == doctest::Approx(1400.0));  // 1000 + ewma(400)
    CHECK(decision.rationale["B"] == doctest::Approx(600.0));
    CHECK(decision.quotas.entries["A"] == doctest::Approx(0.7));
}

TEST_CASE("build_report on an idle slice is all zeros with the window bounds") {
    Mac mac(TtiConfig{1000, 100}, false);
    KpiReport report = build_report(mac, "idle", 100'000, 200'000);
    CHECK(report.slice_id == "idle");
    CHECK(report.window_start == 100'000);
    CHECK(report.window_end == 200'000);
    CHECK(report.arrived_bytes == 0);
    CHECK(report.delivered_bytes == 0);
    CHECK(report.backlog_bytes == 0);
    CHECK(report.active_streams == 0);
    CHECK(report.disconnects == 0);
    CHECK(report.mean_response_bytes == 0.0);
}

// Hand-walked window: one 400-byte response arrives and is fully delivered.
TEST_CASE("build_report aggregates a completed response") {
    Mac mac(TtiConfig{1000, 100}, false);
    LinkMap links = {{"ue1", {"ue1", 10}}};
    mac.enqueue("A", "ue1", 1, 400, 10'000, 400);

    TtiAllocation allocation;
    allocation.grants[QueueKey{"A", "ue1"}] = 4;  // 480 B capacity
    auto fragments = mac.deliver(allocation, links, 11'000);
    REQUIRE(fragments.size() == 1);
    REQUIRE(fragments[0].completed);

    KpiReport report = build_report(mac, "A", 0, 100'000);
    CHECK(report.arrived_bytes == 400);
    CHECK(report.delivered_bytes == 400);
    CHECK(report.backlog_bytes == 0);
    CHECK(report.active_streams == 1);  // in flight within the window
    CHECK(report.mean_response_bytes == doctest::Approx(400.0));
    CHECK(report.delivered_bytes <= report.arrived_bytes);

    // The next window starts clean.
    KpiReport next = build_report(mac, "A", 100'000, 200'000);
    CHECK(next.arrived_bytes == 0);
    CHECK(next.active_streams == 0);
}

TEST_CASE("decision timing lands on the next boundary strictly after the delay") {
    // On-boundary landing moves to the following TTI.
    CHECK(decision_effective_time(100'000, 5'000, 1'000) == 106'000);
    CHECK(decision_effective_time(100'500, 5'000, 1'000) == 106'000);
    CHECK(decision_effective_time(0, 0, 1'000) == 1'000);
}

TEST_CASE("quota decisions require dynamic mode") {
    std::deque<PendingQuota> pending;
    QuotaDecision decision;
    decision.quotas.entries = {{"A", 1.0}};

    SchedulerMode dynamic{SchedulerPolicy::Dynamic, true};
    SimTime effective =
        schedule_quota_decision(pending, decision, dynamic, 100'000, 5'000, 1'000);
    CHECK(effective == 106'000);
    REQUIRE(pending.size() == 1);
    CHECK(pending.front().effective == 106'000);

    SchedulerMode wrong{SchedulerPolicy::Static, false};
    CHECK_THROWS_WITH_AS(schedule_quota_decision(pending, decision, wrong, 0, 0, 1'000),
                         doctest::Contains("ModeMismatch"), Error);
}

TEST_CASE("re-applying an identical quota changes nothing") {
    QuotaVector quota;
    quota.entries = {{"A", 0.6}, {"B", 0.4}};
    auto first = partition_prbs(quota, 100);
    auto second = partition_prbs(quota, 100);
    CHECK(first == second);
}
