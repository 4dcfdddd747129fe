#include "bwsim/paper_scenarios.hpp"

namespace bwsim {

namespace {

// Two cores: core 0 runs one RT task whose kernel spans the whole window
// (so the bandwidth lock is held throughout), core 1 runs the intense/mild
// pair. The intense task's demand is three times the throttle budget per
// period, so it exhausts the budget a third of the way into each period;
// the mild task stays under budget.
Scenario intense_mild_pair(time_us duration_us, const std::string& intense_id,
                           const std::string& mild_id) {
    Scenario scenario;
    scenario.config.n_cores = 2;
    scenario.config.rt_core = 0;
    scenario.config.regulation_period_us = 1'000;
    scenario.config.throttle_budget_bytes = 100'000;
    scenario.config.tfs_rho_ppm = 0;
    scenario.config.slowdown.mode = ContentionParams::Mode::None;
    scenario.sim_duration_us = duration_us;
    scenario.scheduler = SchedulerMode::Cfs;

    RtTaskSpec rt;
    rt.id = "tau_rt";
    rt.period_us = std::max<time_us>(duration_us, 15'000);
    rt.priority = 10;
    rt.segments.push_back(Segment{SegmentKind::KernelLaunch, duration_us, 0});
    rt.segments.push_back(Segment{SegmentKind::DeviceSync, 0, std::nullopt});
    scenario.rt_tasks.push_back(rt);

    BestEffortTaskSpec mild;
    mild.id = mild_id;
    mild.demand_bytes_per_ms = 10'000;  // well under budget, never throttles
    mild.core = 1;
    BestEffortTaskSpec intense;
    intense.id = intense_id;
    intense.demand_bytes_per_ms = 300'000;  // exhausts 100 KB a third in
    intense.core = 1;
    scenario.be_tasks.push_back(mild);
    scenario.be_tasks.push_back(intense);
    return scenario;
}

} // namespace

std::vector<std::string> paper_scenario_names() {
    return {"fig4-cfs", "fig4-ideal", "fig4-tfs3", "tfs-synthetic"};
}

Scenario make_paper_scenario(const std::string& name) {
    if (name == "fig4-cfs") {
        return intense_mild_pair(6'000, "tau_mem", "tau_cpu");
    }
    if (name == "fig4-ideal") {
        // Constructed zero-throttle schedule: the memory-intensive task
        // starts with its vruntime beyond anything the CPU-intensive task
        // can accumulate in the window, so it is never picked.
        Scenario scenario = intense_mild_pair(6'000, "tau_mem", "tau_cpu");
        for (BestEffortTaskSpec& task : scenario.be_tasks) {
            if (task.id == "tau_mem") task.initial_vruntime_ps = 6'000 * kPsPerUs;
        }
        return scenario;
    }
    if (name == "fig4-tfs3") {
        Scenario scenario = intense_mild_pair(6'000, "tau_mem", "tau_cpu");
        scenario.scheduler = SchedulerMode::Tfs;
        scenario.config.tfs_rho_ppm = 3 * kPpmScale;
        return scenario;
    }
    if (name == "tfs-synthetic") {
        Scenario scenario = intense_mild_pair(1'000'000, "intense", "mild");
        scenario.config.tfs_rho_ppm = kPpmScale;
        return scenario;
    }
    std::string names;
    for (const std::string& known : paper_scenario_names()) {
        if (!names.empty()) names += ", ";
        names += known;
    }
    throw ScenarioError(ScenarioError::Kind::Invariant, "name",
                        "unknown scenario \"" + name + "\"; valid names: " + names);
}

Scenario builtin_calibration_scenario() {
    Scenario scenario;
    scenario.config.n_cores = 4;
    scenario.config.rt_core = 0;
    scenario.config.regulation_period_us = 1'000;
    // Effectively unregulated: the budget is far above what the co-runners
    // can consume in a period, so the full contention hits the kernel.
    scenario.config.throttle_budget_bytes = kUnlimitedBudgetBytes / 4;
    scenario.config.slowdown.mode = ContentionParams::Mode::Linear;
    scenario.config.slowdown.alpha_ppm = 2'300'000;            // fitted: 1 + 2.3 = 3.3x
    scenario.config.slowdown.bw_ref_bytes_per_ms = 900'000;    // the co-runner aggregate
    scenario.sim_duration_us = 40'000;
    scenario.scheduler = SchedulerMode::Cfs;

    RtTaskSpec rt;
    rt.id = "gpu_task";
    rt.period_us = 40'000;
    rt.priority = 10;
    rt.segments.push_back(Segment{SegmentKind::KernelLaunch, 10'000, 0});
    rt.segments.push_back(Segment{SegmentKind::DeviceSync, 0, std::nullopt});
    scenario.rt_tasks.push_back(rt);

    for (int core = 1; core <= 3; ++core) {
        BestEffortTaskSpec corunner;
        corunner.id = "corun" + std::to_string(core);
        corunner.demand_bytes_per_ms = 300'000;
        corunner.core = core;
        scenario.be_tasks.push_back(corunner);
    }
    return scenario;
}

} // namespace bwsim
