#ifndef BWSIM_WORKLOAD_HPP
#define BWSIM_WORKLOAD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bwsim/contention.hpp"
#include "bwsim/units.hpp"

namespace bwsim {

enum class SegmentKind {
    CpuCompute,
    SyncCopy,
    AsyncCopy,
    KernelLaunch,
    DeviceSync,
    StreamSync,
    ThreadSync,
    ConfigureCall,
};

const char* segment_kind_name(SegmentKind kind);

/// One step of a real-time task's program. Sync points carry no duration of
/// their own; they block until the simulated GPU drains.
struct Segment {
    SegmentKind kind = SegmentKind::CpuCompute;
    time_us duration_us = 0;
    std::optional<int> stream;

    bool operator==(const Segment&) const = default;
};

struct RtTaskSpec {
    std::string id;
    time_us period_us = 0;
    int priority = 1;
    std::vector<Segment> segments;

    bool operator==(const RtTaskSpec&) const = default;
};

struct BestEffortTaskSpec {
    std::string id;
    std::int64_t weight_mil = kWeightScale;    // fair-share weight, thousandths
    std::int64_t demand_bytes_per_ms = 0;      // memory demand while executing
    int core = 1;
    vrun_ps initial_vruntime_ps = 0;           // used by constructed schedules

    bool operator==(const BestEffortTaskSpec&) const = default;
};

struct SystemConfig {
    int n_cores = 2;
    int rt_core = 0;
    time_us regulation_period_us = 1'000;
    std::int64_t throttle_budget_bytes = 100'000;
    std::int64_t max_budget_bytes = kUnlimitedBudgetBytes;
    std::int64_t tfs_rho_ppm = kPpmScale;      // 1.0
    int ceiling_priority = 99;
    ContentionParams slowdown;
    time_us tick_resolution_us = 10;

    bool operator==(const SystemConfig&) const = default;
};

enum class SchedulerMode { Cfs, Tfs };

struct Scenario {
    SystemConfig config;
    std::vector<RtTaskSpec> rt_tasks;
    std::vector<BestEffortTaskSpec> be_tasks;
    time_us sim_duration_us = 0;
    SchedulerMode scheduler = SchedulerMode::Cfs;

    bool operator==(const Scenario&) const = default;
};

/// Cumulative worst-case demands of a task, split by segment class.
/// Async copies overlap kernel execution and count toward the GPU window.
struct Wcet {
    time_us compute_us = 0;    // C
    time_us sync_copy_us = 0;  // Gm
    time_us gpu_exec_us = 0;   // Ge (kernels + async copies)
    time_us total_us = 0;      // E = C + Gm + Ge
};

Wcet derived_wcet(const RtTaskSpec& task);

/// Scenario rejection, carrying the offending field for error reporting.
class ScenarioError : public std::runtime_error {
public:
    enum class Kind { Syntax, Invariant, DuplicateId };

    ScenarioError(Kind kind, std::string field, const std::string& message)
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

    Kind kind() const { return kind_; }
    const std::string& field() const { return field_; }

private:
    Kind kind_;
    std::string field_;
};

/// Checks every scenario invariant; throws ScenarioError on violation.
/// Returns non-fatal warnings (e.g. an RT task with E > P).
std::vector<std::string> validate_scenario(const Scenario& scenario);

} // namespace bwsim

#endif // BWSIM_WORKLOAD_HPP
