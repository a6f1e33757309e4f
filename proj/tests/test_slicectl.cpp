#include <doctest.h>

#include <set>

#include "llmslice/errors.hpp"
#include "llmslice/rng.hpp"
#include "llmslice/slicectl.hpp"

using namespace llmslice;

namespace {

ControlMessage msg_of(MsgKind kind, bool ok = false) {
    return ControlMessage{kind, "s1", "ue1", 0, ok};
}

// All distinct FSM inputs: message kinds with PermissionReply split by ok.
struct FsmInput {
    MsgKind kind;
    bool ok;
};

const std::vector<FsmInput> kAllInputs = {
    {MsgKind::SliceRequest, false}, {MsgKind::Register, false},
    {MsgKind::PermissionQuery, false}, {MsgKind::PermissionReply, true},
    {MsgKind::PermissionReply, false}, {MsgKind::Activate, false},
    {MsgKind::Reject, false}, {MsgKind::Release, false},
};

const std::vector<SliceState> kAllStates = {
    SliceState::Requested, SliceState::Registered, SliceState::Checking,
    SliceState::Active, SliceState::Rejected, SliceState::Released,
};

}  // namespace

TEST_CASE("fsm_step implements exactly the transition table") {
    CHECK(fsm_step(SliceState::Requested, msg_of(MsgKind::Register)) == SliceState::Registered);
    CHECK(fsm_step(SliceState::Registered, msg_of(MsgKind::PermissionQuery)) ==
          SliceState::Checking);
    CHECK(fsm_step(SliceState::Checking, msg_of(MsgKind::PermissionReply, true)) ==
          SliceState::Active);
    CHECK(fsm_step(SliceState::Checking, msg_of(MsgKind::PermissionReply, false)) ==
          SliceState::Rejected);
    CHECK(fsm_step(SliceState::Active, msg_of(MsgKind::Release)) == SliceState::Released);

    CHECK_THROWS_WITH_AS(fsm_step(SliceState::Active, msg_of(MsgKind::Register)),
                         doctest::Contains("InvalidTransition"), Error);
}

// Exhaustive enumeration over all (state, input) pairs: exactly the five
// listed transitions are valid, everything else is rejected.
TEST_CASE("fsm transition table is exhaustive") {
    int valid = 0;
    for (SliceState state : kAllStates) {
        for (const FsmInput& input : kAllInputs) {
            auto next = try_fsm_step(state, msg_of(input.kind, input.ok));
            bool expected_valid =
                (state == SliceState::Requested && input.kind == MsgKind::Register) ||
                (state == SliceState::Registered && input.kind == MsgKind::PermissionQuery) ||
                (state == SliceState::Checking && input.kind == MsgKind::PermissionReply) ||
                (state == SliceState::Active && input.kind == MsgKind::Release);
            CHECK(next.has_value() == expected_valid);
            if (next) {
                ++valid;
                if (state == SliceState::Checking) {
                    CHECK(*next == (input.ok ? SliceState::Active : SliceState::Rejected));
                }
            }
        }
    }
    CHECK(valid == 5);  // the five (state, input) rows of the table
}

// Fuzz: no random message sequence reaches Active without consuming a
// PermissionReply(ok) while Checking.
TEST_CASE("fsm safety under 10k random message sequences") {
    RngStream rng(31337, "fsm/fuzz");
    for (int trial = 0; trial < 10000; ++trial) {
        SliceState state = SliceState::Requested;
        bool ok_reply_consumed = false;
        int steps = 1 + static_cast<int>(rng.uniform_int(12));
        for (int i = 0; i < steps; ++i) {
            const FsmInput& input = kAllInputs[rng.uniform_int(kAllInputs.size())];
            auto next = try_fsm_step(state, msg_of(input.kind, input.ok));
            if (!next) continue;  // lenient mode: count-and-ignore
            if (state == SliceState::Checking && input.kind == MsgKind::PermissionReply &&
                input.ok) {
                ok_reply_consumed = true;
            }
            state = *next;
            if (state == SliceState::Active) {
                REQUIRE(ok_reply_consumed);
            }
        }
    }
}

TEST_CASE("authorize is default-deny") {
    PermissionDb db;
    db.add(PermissionRecord{"ue1", "llama", true, "standard"});
    db.add(PermissionRecord{"ue3", "bard", false, "standard"});

    CHECK(db.authorize("ue1", "llama"));
    CHECK_FALSE(db.authorize("ue2", "bard"));   // absent -> deny
    CHECK_FALSE(db.authorize("ue3", "bard"));   // present but not allowed
    CHECK_FALSE(db.authorize("ue1", "bard"));   // wrong service
}

TEST_CASE("load_permissions parses the csv format") {
    SUBCASE("header only") {
        CHECK(load_permissions("ue_id,service_id,allowed,tier\n").size() == 0);
    }
    SUBCASE("two rows with comments and blank lines") {
        PermissionDb db = load_permissions(
            "# fleet permissions\n"
            "ue_id,service_id,allowed,tier\n"
            "\n"
            "ue1,llama,true,standard\n"
            "ue2,bard,false,premium\n");
        CHECK(db.size() == 2);
        CHECK(db.authorize("ue1", "llama"));
        CHECK_FALSE(db.authorize("ue2", "bard"));
    }
    SUBCASE("crlf line endings") {
        PermissionDb db = load_permissions(
            "ue_id,service_id,allowed,tier\r\nue1,llama,true,gold\r\n");
        CHECK(db.size() == 1);
    }
    SUBCASE("invalid boolean names the line") {
        CHECK_THROWS_WITH_AS(load_permissions("ue_id,service_id,allowed,tier\n"
                                              "ue1,llama,maybe,standard\n"),
                             doctest::Contains("line 2"), Error);
    }
    SUBCASE("wrong field count") {
        CHECK_THROWS_AS(load_permissions("ue_id,service_id,allowed,tier\nue1,llama,true\n"),
                        Error);
    }
    SUBCASE("bad header") {
        CHECK_THROWS_WITH_AS(load_permissions("ue,svc,ok,tier\n"), doctest::Contains("header"),
                             Error);
    }
    SUBCASE("duplicate pair") {
        CHECK_THROWS_WITH_AS(load_permissions("ue_id,service_id,allowed,tier\n"
                                              "ue1,llama,true,a\n"
                                              "ue1,llama,false,b\n"),
                             doctest::Contains("DuplicateRecord"), Error);
    }
}

TEST_CASE("registry admission enforces the min-share budget") {
    SliceRegistry registry;
    SliceDescriptor a{"a", "llama", 0.2, 0.8, 0};
    SliceDescriptor b{"b", "bard", 0.5, 0.9, 0};
    SliceDescriptor c{"c", "chatgpt", 0.6, 0.9, 0};

    registry.register_slice(a);
    CHECK(registry.state("a") == SliceState::Registered);
    registry.register_slice(b);  // 0.2 + 0.5 <= 1

    // 0.2 + 0.5 + 0.6 = 1.3 > 1
    CHECK_THROWS_WITH_AS(registry.register_slice(c), doctest::Contains("AdmissionRejected"),
                         Error);

    CHECK_THROWS_WITH_AS(registry.register_slice(a), doctest::Contains("DuplicateSlice"), Error);
}

TEST_CASE("first slice with min 0.2 is admitted") {
    SliceRegistry registry;
    registry.register_slice(SliceDescriptor{"only", "llama", 0.2, 1.0, 0});
    CHECK(registry.state("only") == SliceState::Registered);
    CHECK(registry.admitted_min_share() == doctest::Approx(0.2));
}

TEST_CASE("admission example: existing 0.5, new 0.6 rejected") {
    SliceRegistry registry;
    registry.register_slice(SliceDescriptor{"x", "llama", 0.5, 1.0, 0});
    CHECK_THROWS_AS(registry.register_slice(SliceDescriptor{"y", "bard", 0.6, 1.0, 0}), Error);
}

// Property: however registration attempts interleave, the admitted budget
// never exceeds 1.
TEST_CASE("registry budget property over random descriptors") {
    RngStream rng(9, "registry/fuzz");
    for (int trial = 0; trial < 200; ++trial) {
        SliceRegistry registry;
        double admitted = 0.0;
        for (int i = 0; i < 8; ++i) {
            double min_share = rng.uniform();
            SliceDescriptor desc{"s" + std::to_string(i), "svc", min_share, 1.0, 0};
            try {
                registry.register_slice(desc);
                admitted += min_share;
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::AdmissionRejected);
            }
        }
        CHECK(admitted <= 1.0 + 1e-9);
        CHECK(registry.admitted_min_share() == doctest::Approx(admitted));
    }
}

TEST_CASE("full lifecycle through the registry") {
    SliceRegistry registry;
    SliceDescriptor desc{"s1", "llama", 0.1, 0.9, 0};
    registry.request(desc);
    CHECK(registry.state("s1") == SliceState::Requested);
    registry.register_slice(desc);
    CHECK(registry.state("s1") == SliceState::Registered);
    registry.step("s1", msg_of(MsgKind::PermissionQuery));
    CHECK(registry.state("s1") == SliceState::Checking);
    registry.step("s1", msg_of(MsgKind::PermissionReply, true));
    CHECK(registry.state("s1") == SliceState::Active);
    CHECK(registry.active_slices() == std::vector<SliceId>{"s1"});
    registry.step("s1", msg_of(MsgKind::Release));
    CHECK(registry.state("s1") == SliceState::Released);
    CHECK(registry.active_slices().empty());
}
