#include "bwsim/taskgen.hpp"

#include <algorithm>

#include "bwsim/analysis.hpp"

namespace bwsim {

std::uint64_t Rng::next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
    BWSIM_ASSERT(lo <= hi, "Rng::uniform: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
}

double Rng::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Scenario random_be_scenario(std::uint64_t seed) {
    Rng rng(seed);
    Scenario scenario;
    const int be_cores = static_cast<int>(rng.uniform(1, 3));
    scenario.config.n_cores = 1 + be_cores;
    scenario.config.rt_core = 0;
    scenario.config.regulation_period_us = 1'000;
    scenario.config.throttle_budget_bytes = rng.uniform(50'000, 400'000);
    scenario.config.tfs_rho_ppm = kPpmScale;
    scenario.config.slowdown.mode = ContentionParams::Mode::None;
    scenario.sim_duration_us = 300'000;
    scenario.scheduler = SchedulerMode::Cfs;

    RtTaskSpec rt;
    rt.id = "rt_lock_holder";
    rt.period_us = scenario.sim_duration_us;
    rt.priority = 10;
    rt.segments.push_back(Segment{SegmentKind::KernelLaunch, scenario.sim_duration_us, 0});
    rt.segments.push_back(Segment{SegmentKind::DeviceSync, 0, std::nullopt});
    scenario.rt_tasks.push_back(rt);

    for (int core = 1; core <= be_cores; ++core) {
        const int entities = static_cast<int>(rng.uniform(2, 3));
        for (int k = 0; k < entities; ++k) {
            BestEffortTaskSpec task;
            task.id = "be" + std::to_string(core) + "_" + std::to_string(k);
            task.core = core;
            // Mix of intensities around the budget so some entities throttle
            // and some do not.
            task.demand_bytes_per_ms = rng.uniform(20'000, 900'000);
            scenario.be_tasks.push_back(task);
        }
    }
    return scenario;
}

namespace {

RtTaskSpec make_rt_task(Rng& rng, const std::string& id, int priority, time_us period_us,
                        time_us wcet_us, bool with_gpu) {
    RtTaskSpec task;
    task.id = id;
    task.priority = priority;
    task.period_us = period_us;
    if (!with_gpu || wcet_us < 300) {
        task.segments.push_back(Segment{SegmentKind::CpuCompute, wcet_us, std::nullopt});
        return task;
    }
    // lead compute | optional sync copy | kernel | device sync | tail compute
    time_us remaining = wcet_us;
    const time_us kernel_us = std::max<time_us>(100, (remaining * rng.uniform(20, 60)) / 100);
    remaining -= kernel_us;
    time_us copy_us = 0;
    if (rng.uniform(0, 1) == 1 && remaining > 200) {
        copy_us = std::max<time_us>(50, (remaining * rng.uniform(10, 30)) / 100);
        remaining -= copy_us;
    }
    const time_us lead_us = remaining / 2;
    const time_us tail_us = remaining - lead_us;
    if (lead_us > 0) task.segments.push_back(Segment{SegmentKind::CpuCompute, lead_us, std::nullopt});
    if (copy_us > 0) task.segments.push_back(Segment{SegmentKind::SyncCopy, copy_us, std::nullopt});
    task.segments.push_back(Segment{SegmentKind::KernelLaunch, kernel_us, 0});
    task.segments.push_back(Segment{SegmentKind::DeviceSync, 0, std::nullopt});
    if (tail_us > 0) task.segments.push_back(Segment{SegmentKind::CpuCompute, tail_us, std::nullopt});
    return task;
}

} // namespace

std::vector<RtTaskSpec> random_rt_taskset(std::uint64_t seed, int max_tasks, bool gpu_top_only) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const int n = static_cast<int>(rng.uniform(2, std::max(2, max_tasks)));
        static constexpr time_us kPeriods[] = {5'000,  8'000,  10'000, 15'000,
                                               20'000, 30'000, 40'000, 60'000};
        std::vector<RtTaskSpec> taskset;
        double utilization_left = 0.75;
        for (int i = 0; i < n; ++i) {
            const time_us period = kPeriods[rng.uniform(0, 7)];
            const double share = utilization_left * (0.2 + 0.6 * rng.uniform01()) /
                                 static_cast<double>(n - i);
            utilization_left -= share;
            time_us wcet = static_cast<time_us>(share * static_cast<double>(period));
            wcet = std::max<time_us>(100, (wcet / 10) * 10);
            // priority n-i: earlier tasks rank higher
            const bool with_gpu = gpu_top_only ? (i == 0) : rng.uniform(0, 1) == 1;
            taskset.push_back(
                make_rt_task(rng, "rt" + std::to_string(i), n - i, period, wcet, with_gpu));
        }
        const AnalysisResult verdict = response_time(taskset);
        if (verdict.schedulable) return taskset;
    }
    // Fall back to a trivially schedulable pair.
    std::vector<RtTaskSpec> taskset;
    taskset.push_back(make_rt_task(rng, "rt0", 2, 20'000, 2'000, !gpu_top_only));
    taskset.push_back(make_rt_task(rng, "rt1", 1, 40'000, 4'000, false));
    return taskset;
}

Scenario rt_taskset_scenario(std::vector<RtTaskSpec> taskset, time_us duration_us) {
    Scenario scenario;
    scenario.config.n_cores = 2;
    scenario.config.rt_core = 0;
    scenario.config.slowdown.mode = ContentionParams::Mode::None;
    scenario.rt_tasks = std::move(taskset);
    scenario.sim_duration_us = duration_us;
    scenario.scheduler = SchedulerMode::Cfs;
    return scenario;
}

} // namespace bwsim
