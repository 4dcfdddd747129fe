#include "bwsim/fair_sched.hpp"

#include <algorithm>

#include "bwsim/contention.hpp"

namespace bwsim {

namespace {

using int128 = __int128;

vrun_ps weighted_delta_ps(time_us ran_us, std::int64_t weight_mil) {
    // ran / W, in picoseconds: ran_us * 1e6 * 1000 / weight_mil.
    const int128 num = static_cast<int128>(ran_us) * kPsPerUs * kWeightScale;
    return static_cast<vrun_ps>(num / weight_mil);
}

} // namespace

SchedEntity make_entity(const BestEffortTaskSpec& spec) {
    SchedEntity entity;
    entity.task_id = spec.id;
    entity.weight_mil = spec.weight_mil;
    entity.demand_bytes_per_ms = spec.demand_bytes_per_ms;
    entity.vruntime = spec.initial_vruntime_ps;
    return entity;
}

void charge_runtime(SchedEntity& entity, time_us ran_us) {
    BWSIM_ASSERT(ran_us >= 0, "charge_runtime: negative interval");
    if (ran_us == 0) return;
    entity.accumulated_runtime_us += ran_us;
    entity.vruntime += weighted_delta_ps(ran_us, entity.weight_mil);
}

void tfs_inflate(SchedEntity& entity, std::int64_t rho_ppm) {
    BWSIM_ASSERT(rho_ppm >= 0, "tfs_inflate: negative rho");
    // delta_us * rho in picoseconds is exactly delta_us * rho_ppm.
    entity.vruntime += entity.throttled_this_period_us * rho_ppm;
    entity.throttled_this_period_us = 0;
}

vrun_ps lost_vruntime(std::span<const time_us> deltas_us, std::int64_t rho_ppm) {
    vrun_ps total = 0;
    for (time_us delta : deltas_us) total += delta * rho_ppm;
    return total;
}

void RunQueue::add(SchedEntity entity) {
    // Joiners never enter below the current minimum, so a fresh task cannot
    // monopolize the core while it catches up.
    if (!entities_.empty()) {
        const SchedEntity* min_entity = pick_next();
        entity.vruntime = std::max(entity.vruntime, min_entity->vruntime);
    }
    entities_.push_back(std::move(entity));
}

SchedEntity* RunQueue::pick_next() {
    return const_cast<SchedEntity*>(std::as_const(*this).pick_next());
}

const SchedEntity* RunQueue::pick_next() const {
    const SchedEntity* best = nullptr;
    for (const SchedEntity& entity : entities_) {
        if (best == nullptr || entity.vruntime < best->vruntime ||
            (entity.vruntime == best->vruntime && entity.task_id < best->task_id)) {
            best = &entity;
        }
    }
    return best;
}

SchedEntity* RunQueue::find(const std::string& task_id) {
    for (SchedEntity& entity : entities_) {
        if (entity.task_id == task_id) return &entity;
    }
    return nullptr;
}

std::int64_t starvation_window_periods(vrun_ps vruntime_spread, vrun_ps min_advance_ps,
                                       std::int64_t entity_count) {
    BWSIM_ASSERT(min_advance_ps > 0, "starvation_window_periods: advance must be positive");
    BWSIM_ASSERT(entity_count >= 1, "starvation_window_periods: empty queue");
    const std::int64_t runs_to_pass =
        vruntime_spread <= 0 ? 1 : ceil_div(vruntime_spread, min_advance_ps) + 1;
    return (entity_count - 1) * runs_to_pass + 1;
}

vrun_ps min_period_advance_ps(std::int64_t demand_bytes_per_ms, std::int64_t weight_mil,
                              std::int64_t budget_bytes, time_us period_us,
                              std::int64_t rho_ppm) {
    const ExhaustSplit split = time_to_exhaust(demand_bytes_per_ms, budget_bytes, period_us);
    const int128 run = static_cast<int128>(split.run_us) * kPsPerUs * kWeightScale / weight_mil;
    const int128 punish = static_cast<int128>(split.throttled_us) * rho_ppm;
    return static_cast<vrun_ps>(run + punish);
}

} // namespace bwsim
