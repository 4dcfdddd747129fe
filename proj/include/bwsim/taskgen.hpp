#ifndef BWSIM_TASKGEN_HPP
#define BWSIM_TASKGEN_HPP

#include <cstdint>
#include <vector>

#include "bwsim/workload.hpp"

namespace bwsim {

/// Deterministic splitmix64 generator; identical sequences on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Uniform in [lo, hi], inclusive.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi);
    double uniform01();

private:
    std::uint64_t state_;
};

/// Random best-effort scenario: one RT lock holder spanning the run plus
/// 1-3 regulated cores with mixed-intensity entities. Demand rates and the
/// throttle budget are randomized; the contention model is off so results
/// isolate scheduling effects.
Scenario random_be_scenario(std::uint64_t seed);

/// Random RT-only taskset (2..max_tasks tasks, distinct priorities, total
/// utilization <= ~0.75, every task's analysis convergent). When
/// gpu_top_only is set, only the highest-priority task carries lock-
/// protected segments; otherwise any task may.
std::vector<RtTaskSpec> random_rt_taskset(std::uint64_t seed, int max_tasks, bool gpu_top_only);

/// Wraps a taskset in a contention-free scenario with synchronous release.
Scenario rt_taskset_scenario(std::vector<RtTaskSpec> taskset, time_us duration_us);

} // namespace bwsim

#endif // BWSIM_TASKGEN_HPP
