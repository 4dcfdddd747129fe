#include <doctest.h>

#include <vector>

#include "bwsim/fair_sched.hpp"
#include "bwsim/taskgen.hpp"

using namespace bwsim;

namespace {

SchedEntity entity(const std::string& id, std::int64_t weight_mil = 1'000) {
    BestEffortTaskSpec spec;
    spec.id = id;
    spec.weight_mil = weight_mil;
    return make_entity(spec);
}

} // namespace

TEST_CASE("charge_runtime divides by the weight") {
    SUBCASE("unit weight, one third of a period") {
        SchedEntity e = entity("tau_mem");
        charge_runtime(e, 330);  // 0.33 ms
        CHECK(e.vruntime == 330 * kPsPerUs);
        CHECK(e.accumulated_runtime_us == 330);
    }
    SUBCASE("weight two halves the advance") {
        SchedEntity e = entity("t", 2'000);
        charge_runtime(e, 4'000);
        CHECK(e.vruntime == 2'000 * kPsPerUs);
    }
    SUBCASE("zero charge is the identity") {
        SchedEntity e = entity("t");
        charge_runtime(e, 500);
        const SchedEntity before = e;
        charge_runtime(e, 0);
        CHECK(e.vruntime == before.vruntime);
        CHECK(e.accumulated_runtime_us == before.accumulated_runtime_us);
    }
}

TEST_CASE("tfs_inflate adds delta times rho and resets the period counter") {
    SUBCASE("worked example: V 0.33, delta 0.67, rho 3 gives 2.34") {
        SchedEntity e = entity("tau_mem");
        charge_runtime(e, 330);
        e.throttled_this_period_us = 670;
        tfs_inflate(e, 3 * kPpmScale);
        CHECK(e.vruntime == 2'340 * kPsPerUs);
        CHECK(e.throttled_this_period_us == 0);
    }
    SUBCASE("unthrottled entity is unpunished") {
        SchedEntity e = entity("t");
        charge_runtime(e, 500);
        tfs_inflate(e, 3 * kPpmScale);
        CHECK(e.vruntime == 500 * kPsPerUs);
    }
    SUBCASE("rho 1 adds the delta directly") {
        SchedEntity e = entity("t");
        charge_runtime(e, 1'000);
        e.throttled_this_period_us = 500;
        tfs_inflate(e, kPpmScale);
        CHECK(e.vruntime == 1'500 * kPsPerUs);
    }
}

TEST_CASE("lost_vruntime is rho times the delta sum") {
    const std::vector<time_us> deltas{670, 670};
    CHECK(lost_vruntime(deltas, 3 * kPpmScale) == 4'020 * kPsPerUs);
    CHECK(lost_vruntime(std::vector<time_us>{}, 3 * kPpmScale) == 0);
    CHECK(lost_vruntime(std::vector<time_us>{}, 0) == 0);
}

TEST_CASE("pick_next takes the smallest (vruntime, id)") {
    SUBCASE("smaller vruntime wins") {
        RunQueue queue;
        queue.add(entity("tau_cpu"));
        queue.add(entity("tau_mem"));
        charge_runtime(*queue.find("tau_cpu"), 1'000);
        charge_runtime(*queue.find("tau_mem"), 330);
        CHECK(queue.pick_next()->task_id == "tau_mem");
    }
    SUBCASE("single entity") {
        RunQueue queue;
        queue.add(entity("only"));
        CHECK(queue.pick_next()->task_id == "only");
    }
    SUBCASE("equal vruntimes break toward the lower id") {
        RunQueue queue;
        queue.add(entity("b"));
        queue.add(entity("a"));
        CHECK(queue.pick_next()->task_id == "a");
    }
    SUBCASE("empty queue picks nothing") {
        RunQueue queue;
        CHECK(queue.pick_next() == nullptr);
    }
}

TEST_CASE("pick_next is deterministic across identical queues") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        RunQueue a;
        RunQueue b;
        const int n = static_cast<int>(rng.uniform(1, 6));
        for (int i = 0; i < n; ++i) {
            SchedEntity e = entity("t" + std::to_string(i), rng.uniform(500, 3'000));
            e.vruntime = rng.uniform(0, 5) * kPsPerUs;  // deliberate ties
            a.add(e);
            b.add(e);
        }
        CHECK(a.pick_next()->task_id == b.pick_next()->task_id);
    }
}

TEST_CASE("joining entities do not undercut the queue minimum") {
    RunQueue queue;
    SchedEntity veteran = entity("veteran");
    charge_runtime(veteran, 10'000);
    queue.add(veteran);
    queue.add(entity("newcomer"));
    CHECK(queue.find("newcomer")->vruntime == queue.find("veteran")->vruntime);
}

TEST_CASE("starvation window bound") {
    // Unthrottled unit-weight entities advance a full period per run.
    const vrun_ps full = min_period_advance_ps(0, 1'000, 100'000, 1'000, 0);
    CHECK(full == 1'000 * kPsPerUs);
    // Two entities, spread of one period: ceil(G/T) + 2.
    CHECK(starvation_window_periods(1'000 * kPsPerUs, full, 2) == 3);

    // The throttled intense task advances Q/r plus the punished remainder.
    const vrun_ps throttled_rho0 = min_period_advance_ps(300'000, 1'000, 100'000, 1'000, 0);
    CHECK(throttled_rho0 == 334 * kPsPerUs);
    // Under rho >= 1 the punishment restores at least a full period.
    const vrun_ps throttled_rho1 =
        min_period_advance_ps(300'000, 1'000, 100'000, 1'000, kPpmScale);
    CHECK(throttled_rho1 >= 1'000 * kPsPerUs);

    // The intense/mild pair at spread 1 ms: the intense entity advances a
    // third of a period per run, so it may hold the core for four periods;
    // the bound covers that with one to spare.
    CHECK(starvation_window_periods(1'000 * kPsPerUs, throttled_rho0, 2) == 5);
    CHECK(starvation_window_periods(0, full, 2) == 2);
    // With k entities at equal vruntime, everyone runs within k periods.
    CHECK(starvation_window_periods(0, full, 3) == 3);
    CHECK(starvation_window_periods(0, full, 1) == 1);
}
