#ifndef BWSIM_FAIR_SCHED_HPP
#define BWSIM_FAIR_SCHED_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bwsim/units.hpp"
#include "bwsim/workload.hpp"

namespace bwsim {

/// Per-task fair-scheduler state. vruntime advances by executed time divided
/// by weight; a throttled period additionally inflates it by delta * rho.
struct SchedEntity {
    std::string task_id;
    std::int64_t weight_mil = kWeightScale;
    std::int64_t demand_bytes_per_ms = 0;

    vrun_ps vruntime = 0;
    time_us accumulated_runtime_us = 0;
    time_us throttled_this_period_us = 0;
    std::optional<time_us> throttle_start;
};

SchedEntity make_entity(const BestEffortTaskSpec& spec);

/// vruntime += ran / weight; runtime += ran.
void charge_runtime(SchedEntity& entity, time_us ran_us);

/// Period-boundary punishment: vruntime += throttled_this_period * rho,
/// then the per-period throttle counter resets. Pass rho 0 for plain fair
/// scheduling (the inflation degenerates to the reset alone).
void tfs_inflate(SchedEntity& entity, std::int64_t rho_ppm);

/// Total virtual runtime a task lost to inflation: rho * sum(deltas).
vrun_ps lost_vruntime(std::span<const time_us> deltas_us, std::int64_t rho_ppm);

/// Run queue for one best-effort core. Pick order is (vruntime, task id),
/// so identical queues always yield identical picks.
class RunQueue {
public:
    void add(SchedEntity entity);

    SchedEntity* pick_next();
    const SchedEntity* pick_next() const;

    bool empty() const { return entities_.empty(); }
    std::size_t size() const { return entities_.size(); }
    std::span<SchedEntity> entities() { return entities_; }
    std::span<const SchedEntity> entities() const { return entities_; }
    SchedEntity* find(const std::string& task_id);

private:
    std::vector<SchedEntity> entities_;
};

/// Window length, in regulation periods, within which every runnable entity
/// is guaranteed to run at least once:
///
///   (k - 1) * (ceil(spread / min_advance) + 1) + 1
///
/// where k is the entity count and min_advance the smallest per-period
/// vruntime advance any entity can make. Each period the minimum-vruntime
/// entity runs and advances at least min_advance, so every other entity
/// needs at most ceil(spread / min_advance) + 1 runs to pass the laggard.
/// For two entities with full-period advance this is ceil(spread / T) + 2.
std::int64_t starvation_window_periods(vrun_ps vruntime_spread, vrun_ps min_advance_ps,
                                       std::int64_t entity_count);

/// Lower bound on the vruntime advance an entity makes in one period it is
/// scheduled: run_time/weight + throttled*rho with run time min(T, Q/r).
vrun_ps min_period_advance_ps(std::int64_t demand_bytes_per_ms, std::int64_t weight_mil,
                              std::int64_t budget_bytes, time_us period_us,
                              std::int64_t rho_ppm);

} // namespace bwsim

#endif // BWSIM_FAIR_SCHED_HPP
