#include <doctest.h>

#include "bwsim/rt_sched.hpp"
#include "bwsim/taskgen.hpp"

using namespace bwsim;

namespace {

constexpr int kCeiling = 99;

RtJob job(const std::string& id, int priority, time_us release = 0) {
    RtJob j;
    j.task_id = id;
    j.priority = priority;
    j.release_us = release;
    return j;
}

} // namespace

TEST_CASE("sys_bwlock acquire boosts and release restores") {
    RtCoreState state;
    state.running = job("gpu", 10);

    CHECK(sys_bwlock("gpu", 1, state) == BwCallResult::Acquired);
    CHECK(state.lock.bwlock_val == 1);
    CHECK(state.lock.holder == "gpu");
    CHECK(state.lock.saved_priority == 10);
    CHECK(effective_priority(*state.running, state.lock, kCeiling) == kCeiling);

    CHECK(sys_bwlock("gpu", 0, state) == BwCallResult::Released);
    CHECK(state.lock.bwlock_val == 0);
    CHECK(!state.lock.holder.has_value());
    CHECK(!state.lock.saved_priority.has_value());
    CHECK(effective_priority(*state.running, state.lock, kCeiling) == 10);
}

TEST_CASE("sys_bwlock ignores callers that are not running on the RT core") {
    RtCoreState state;
    state.running = job("gpu", 10);
    CHECK(sys_bwlock("best_effort", 1, state) == BwCallResult::RejectedNotRunning);
    CHECK(state.lock.bwlock_val == 0);

    RtCoreState idle;
    CHECK(sys_bwlock("anyone", 1, idle) == BwCallResult::RejectedNotRunning);
}

TEST_CASE("repeated calls never clobber the saved priority") {
    RtCoreState state;
    state.running = job("gpu", 10);
    CHECK(sys_bwlock("gpu", 1, state) == BwCallResult::Acquired);
    CHECK(sys_bwlock("gpu", 1, state) == BwCallResult::IgnoredAlreadyHeld);
    CHECK(state.lock.saved_priority == 10);
    CHECK(sys_bwlock("gpu", 0, state) == BwCallResult::Released);
    CHECK(sys_bwlock("gpu", 0, state) == BwCallResult::IgnoredNotHeld);
    CHECK(effective_priority(*state.running, state.lock, kCeiling) == 10);
}

TEST_CASE("save and restore stay balanced over random call sequences") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        RtCoreState state;
        state.running = job("gpu", static_cast<int>(rng.uniform(1, 50)));
        const int original = state.running->priority;
        const int calls = static_cast<int>(rng.uniform(1, 20));
        for (int i = 0; i < calls; ++i) {
            sys_bwlock("gpu", static_cast<int>(rng.uniform(0, 2)), state);
        }
        if (state.lock.bwlock_val == 0) {
            CHECK(effective_priority(*state.running, state.lock, kCeiling) == original);
        } else {
            CHECK(state.lock.saved_priority == original);
            sys_bwlock("gpu", 0, state);
            CHECK(effective_priority(*state.running, state.lock, kCeiling) == original);
        }
    }
}

TEST_CASE("rt_pick follows effective priority") {
    SUBCASE("a ceiling-boosted holder keeps the core against higher base priorities") {
        RtCoreState state;
        state.running = job("holder", 5);
        REQUIRE(sys_bwlock("holder", 1, state) == BwCallResult::Acquired);
        state.ready.push_back(job("urgent", 20, 100));
        const auto picked = rt_pick(state, kCeiling);
        REQUIRE(picked.has_value());
        CHECK(picked->task_id == "holder");
        CHECK_FALSE(should_preempt(*state.running, state.ready[0], state.lock, kCeiling));
    }
    SUBCASE("empty core is idle") {
        RtCoreState state;
        CHECK(!rt_pick(state, kCeiling).has_value());
    }
    SUBCASE("preemptive fixed priority without the lock") {
        RtCoreState state;
        state.ready.push_back(job("five", 5));
        state.ready.push_back(job("nine", 9));
        auto picked = rt_pick(state, kCeiling);
        REQUIRE(picked.has_value());
        CHECK(picked->task_id == "nine");

        state.running = job("nine", 9);
        state.ready.clear();
        const RtJob released = job("twelve", 12, 50);
        CHECK(should_preempt(*state.running, released, state.lock, kCeiling));
    }
    SUBCASE("equal priorities are FIFO by release, then id") {
        RtCoreState state;
        state.ready.push_back(job("late", 7, 200));
        state.ready.push_back(job("early", 7, 100));
        CHECK(rt_pick(state, kCeiling)->task_id == "early");
        state.ready.push_back(job("also_early", 7, 100));
        CHECK(rt_pick(state, kCeiling)->task_id == "also_early");
        // Equal priority never preempts.
        state.running = job("running", 7, 0);
        CHECK_FALSE(should_preempt(*state.running, job("late", 7, 200), state.lock, kCeiling));
    }
}
