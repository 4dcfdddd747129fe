#include <doctest.h>

#include <cstdlib>
#include <utility>

#include "bwsim/contention.hpp"
#include "bwsim/taskgen.hpp"

using namespace bwsim;

TEST_CASE("time_to_exhaust splits the period at budget / rate") {
    SUBCASE("0.3 MB/ms against a 0.1 MB budget throttles a third in") {
        // Exact instant is T/3; integer microseconds round the boundary up.
        const ExhaustSplit split = time_to_exhaust(300'000, 100'000, 1'000);
        CHECK(split.run_us == 334);
        CHECK(split.throttled_us == 666);
        CHECK(std::abs(3 * split.run_us - 1'000) <= 3);  // within 1 us of T/3
    }
    SUBCASE("zero demand never throttles") {
        const ExhaustSplit split = time_to_exhaust(0, 100'000, 1'000);
        CHECK(split.run_us == 1'000);
        CHECK(split.throttled_us == 0);
    }
    SUBCASE("rate * T == budget exactly counts as unthrottled") {
        const ExhaustSplit split = time_to_exhaust(100'000, 100'000, 1'000);
        CHECK(split.run_us == 1'000);
        CHECK(split.throttled_us == 0);
    }
}

TEST_CASE("time_to_exhaust monotonicity") {
    // delta non-decreasing in the rate, non-increasing in the budget.
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::int64_t rate = rng.uniform(0, 1'000'000);
        const std::int64_t budget = rng.uniform(1, 1'000'000);
        const time_us period = rng.uniform(1, 10) * 1'000;
        const ExhaustSplit base = time_to_exhaust(rate, budget, period);
        const ExhaustSplit more_rate = time_to_exhaust(rate + rng.uniform(1, 100'000), budget, period);
        const ExhaustSplit more_budget = time_to_exhaust(rate, budget + rng.uniform(1, 100'000), period);
        CHECK(more_rate.throttled_us >= base.throttled_us);
        CHECK(more_budget.throttled_us <= base.throttled_us);
    }
}

TEST_CASE("gpu_slowdown_factor") {
    ContentionParams linear;
    linear.mode = ContentionParams::Mode::Linear;
    linear.alpha_ppm = 2'300'000;
    linear.bw_ref_bytes_per_ms = 900'000;

    SUBCASE("no contention means no slowdown") {
        CHECK(gpu_slowdown_factor(0, linear).value() == 1.0);
    }
    SUBCASE("alpha zero degenerates to unity") {
        ContentionParams degenerate = linear;
        degenerate.alpha_ppm = 0;
        CHECK(gpu_slowdown_factor(500'000, degenerate).value() == 1.0);
    }
    SUBCASE("mode none ignores demand") {
        ContentionParams off;
        off.mode = ContentionParams::Mode::None;
        CHECK(gpu_slowdown_factor(10'000'000, off).value() == 1.0);
    }
    SUBCASE("calibrated worst case: three co-runners at the reference give 3.3x") {
        const SlowdownFactor factor = gpu_slowdown_factor(900'000, linear);
        CHECK(factor.value() == doctest::Approx(3.3).epsilon(1e-9));
    }
    SUBCASE("monotone non-decreasing in aggregate demand") {
        Rng rng(5);
        for (int trial = 0; trial < 300; ++trial) {
            const std::int64_t u = rng.uniform(0, 4'000'000);
            const std::int64_t v = u + rng.uniform(0, 1'000'000);
            CHECK(gpu_slowdown_factor(v, linear).value() >=
                  gpu_slowdown_factor(u, linear).value());
        }
    }
}

TEST_CASE("consumed_bytes clamps to the remaining budget") {
    CHECK(consumed_bytes(300'000, 500, 1'000'000) == 150'000);
    CHECK(consumed_bytes(300'000, 1'000, 0) == 0);
    CHECK(consumed_bytes(300'000, 1'000, 100'000) == 100'000);
}

TEST_CASE("slowed progress and completion invert each other") {
    Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        SlowdownFactor factor{rng.uniform(1, 50), rng.uniform(1, 50)};
        if (factor.num < factor.den) std::swap(factor.num, factor.den);
        const vrun_ps work = rng.uniform(1, 20'000) * kPsPerUs;
        const time_us wall = slowed_completion_us(work, factor);
        // Completion is the first microsecond at which progress covers the work.
        CHECK(slowed_progress_ps(wall, factor) >= work);
        if (wall > 0) CHECK(slowed_progress_ps(wall - 1, factor) < work);
    }
}
