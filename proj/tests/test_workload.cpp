#include <doctest.h>

#include "bwsim/scenario_json.hpp"
#include "bwsim/taskgen.hpp"
#include "bwsim/workload.hpp"

using namespace bwsim;

namespace {

// The two-core taskset used throughout the examples: one RT task plus a
// memory-intensive and a CPU-intensive best-effort task.
const char* kExampleScenario = R"({
  "config": {
    "n_cores": 2,
    "rt_core": 0,
    "regulation_period_ms": 1.0,
    "throttle_budget_bytes": 100000,
    "slowdown": {"mode": "none"}
  },
  "rt_tasks": [
    {"id": "tau_rt", "period_ms": 15, "priority": 10,
     "segments": [{"kind": "compute", "ms": 4.0}]}
  ],
  "be_tasks": [
    {"id": "tau_mem", "weight": 1.0, "demand_bytes_per_ms": 300000, "core": 1},
    {"id": "tau_cpu", "weight": 1.0, "demand_bytes_per_ms": 10000, "core": 1}
  ],
  "sim_duration_ms": 6.0,
  "scheduler": "cfs"
})";

RtTaskSpec task_with(std::vector<Segment> segments) {
    RtTaskSpec task;
    task.id = "t";
    task.period_us = 1'000'000;
    task.priority = 1;
    task.segments = std::move(segments);
    return task;
}

} // namespace

TEST_CASE("parse_scenario accepts the example taskset") {
    const Scenario scenario = parse_scenario(kExampleScenario);
    CHECK(scenario.rt_tasks.size() == 1);
    CHECK(scenario.be_tasks.size() == 2);
    CHECK(scenario.config.regulation_period_us == 1000);
    CHECK(scenario.sim_duration_us == 6000);
    CHECK(scenario.scheduler == SchedulerMode::Cfs);
    CHECK(scenario.rt_tasks[0].period_us == 15000);
    CHECK(scenario.be_tasks[0].demand_bytes_per_ms == 300000);
}

TEST_CASE("parse_scenario accepts empty task lists") {
    const Scenario scenario = parse_scenario(R"({"sim_duration_ms": 5})");
    CHECK(scenario.rt_tasks.empty());
    CHECK(scenario.be_tasks.empty());
    CHECK(scenario.sim_duration_us == 5000);
}

TEST_CASE("parse_scenario rejects a best-effort task on the RT core") {
    const char* text = R"({
      "be_tasks": [{"id": "b", "core": 0}],
      "sim_duration_ms": 1
    })";
    try {
        parse_scenario(text);
        FAIL("expected rejection");
    } catch (const ScenarioError& e) {
        CHECK(e.kind() == ScenarioError::Kind::Invariant);
        CHECK(e.field() == "b.core");
    }
}

TEST_CASE("parse_scenario rejects duplicate ids") {
    const char* text = R"({
      "be_tasks": [{"id": "x", "core": 1}, {"id": "x", "core": 1}],
      "sim_duration_ms": 1
    })";
    CHECK_THROWS_AS(parse_scenario(text), ScenarioError);
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        CHECK(e.kind() == ScenarioError::Kind::DuplicateId);
    }
}

TEST_CASE("parse_scenario reports syntax errors with a position") {
    try {
        parse_scenario("{\"sim_duration_ms\": }");
        FAIL("expected syntax error");
    } catch (const ScenarioError& e) {
        CHECK(e.kind() == ScenarioError::Kind::Syntax);
        CHECK(std::string(e.what()).find("21") != std::string::npos);
    }
}

TEST_CASE("parse_scenario rejects unknown fields by name") {
    try {
        parse_scenario(R"({"sim_duration_ms": 1, "config": {"n_coresx": 2}})");
        FAIL("expected rejection");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("n_coresx") != std::string::npos);
    }
}

TEST_CASE("validate flags an over-full task but keeps the scenario") {
    Scenario scenario = parse_scenario(kExampleScenario);
    scenario.rt_tasks[0].segments[0].duration_us = 20'000;  // E > P
    const auto warnings = validate_scenario(scenario);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("tau_rt") != std::string::npos);
}

TEST_CASE("derived_wcet sums by segment class") {
    SUBCASE("kernel-dominated task") {
        // Kernel 83409 ms, sync copy 18 ms, no compute.
        const RtTaskSpec task = task_with({
            Segment{SegmentKind::SyncCopy, 18'000, std::nullopt},
            Segment{SegmentKind::KernelLaunch, 83'409'000, 0},
            Segment{SegmentKind::DeviceSync, 0, std::nullopt},
        });
        const Wcet w = derived_wcet(task);
        CHECK(w.gpu_exec_us == 83'409'000);
        CHECK(w.sync_copy_us == 18'000);
        CHECK(w.compute_us == 0);
        CHECK(w.total_us == 83'427'000);
    }
    SUBCASE("single compute segment") {
        const Wcet w = derived_wcet(task_with({Segment{SegmentKind::CpuCompute, 4'000, std::nullopt}}));
        CHECK(w.compute_us == 4'000);
        CHECK(w.sync_copy_us == 0);
        CHECK(w.gpu_exec_us == 0);
        CHECK(w.total_us == 4'000);
    }
    SUBCASE("mixed segments") {
        const Wcet w = derived_wcet(task_with({
            Segment{SegmentKind::CpuCompute, 2'000, std::nullopt},
            Segment{SegmentKind::SyncCopy, 1'000, std::nullopt},
            Segment{SegmentKind::KernelLaunch, 3'000, 0},
            Segment{SegmentKind::DeviceSync, 0, std::nullopt},
        }));
        CHECK(w.compute_us == 2'000);
        CHECK(w.sync_copy_us == 1'000);
        CHECK(w.gpu_exec_us == 3'000);
        CHECK(w.total_us == 6'000);
    }
    SUBCASE("async copies count toward the GPU window") {
        const Wcet w = derived_wcet(task_with({
            Segment{SegmentKind::AsyncCopy, 2'000, 1},
            Segment{SegmentKind::KernelLaunch, 3'000, 1},
            Segment{SegmentKind::StreamSync, 0, 1},
        }));
        CHECK(w.gpu_exec_us == 5'000);
        CHECK(w.sync_copy_us == 0);
    }
}

TEST_CASE("derived_wcet is additive under segment-list concatenation") {
    Rng rng(42);
    static constexpr SegmentKind kKinds[] = {
        SegmentKind::CpuCompute, SegmentKind::SyncCopy,  SegmentKind::AsyncCopy,
        SegmentKind::KernelLaunch, SegmentKind::DeviceSync, SegmentKind::StreamSync,
    };
    auto random_segments = [&](int count) {
        std::vector<Segment> segments;
        for (int i = 0; i < count; ++i) {
            Segment seg;
            seg.kind = kKinds[rng.uniform(0, 5)];
            switch (seg.kind) {
            case SegmentKind::CpuCompute:
                seg.duration_us = rng.uniform(0, 5'000);
                break;
            case SegmentKind::SyncCopy:
                seg.duration_us = rng.uniform(1, 5'000);
                break;
            case SegmentKind::AsyncCopy:
            case SegmentKind::KernelLaunch:
                seg.duration_us = rng.uniform(1, 5'000);
                seg.stream = static_cast<int>(rng.uniform(0, 3));
                break;
            case SegmentKind::StreamSync:
                seg.stream = static_cast<int>(rng.uniform(0, 3));
                break;
            default:
                break;
            }
            segments.push_back(seg);
        }
        return segments;
    };

    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_segments(static_cast<int>(rng.uniform(0, 6)));
        const auto b = random_segments(static_cast<int>(rng.uniform(0, 6)));
        std::vector<Segment> both = a;
        both.insert(both.end(), b.begin(), b.end());
        const Wcet wa = derived_wcet(task_with(a));
        const Wcet wb = derived_wcet(task_with(b));
        const Wcet wc = derived_wcet(task_with(both));
        CHECK(wc.compute_us == wa.compute_us + wb.compute_us);
        CHECK(wc.sync_copy_us == wa.sync_copy_us + wb.sync_copy_us);
        CHECK(wc.gpu_exec_us == wa.gpu_exec_us + wb.gpu_exec_us);
        CHECK(wc.total_us == wa.total_us + wb.total_us);
    }
}

TEST_CASE("scenario documents round-trip through render and parse") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        Scenario scenario = random_be_scenario(rng.next());
        // Exercise optional corners as well.
        if (trial % 3 == 0 && !scenario.be_tasks.empty()) {
            scenario.be_tasks[0].initial_vruntime_ps = rng.uniform(1, 50) * kPsPerUs;
            scenario.be_tasks[0].weight_mil = rng.uniform(1, 4000);
        }
        if (trial % 4 == 0) {
            scenario.config.slowdown.mode = ContentionParams::Mode::Linear;
            scenario.config.slowdown.alpha_ppm = rng.uniform(0, 5'000'000);
            scenario.config.slowdown.bw_ref_bytes_per_ms = rng.uniform(1, 2'000'000);
            scenario.config.max_budget_bytes = scenario.config.throttle_budget_bytes * 2;
        }
        if (trial % 5 == 0) {
            scenario.scheduler = SchedulerMode::Tfs;
            scenario.config.tfs_rho_ppm = rng.uniform(0, 10) * kPpmScale / 2;
        }
        const std::string text = render_scenario(scenario);
        const Scenario reparsed = parse_scenario(text);
        CHECK(reparsed == scenario);
        CHECK(render_scenario(reparsed) == text);
    }
}
