#include "bwsim/regulator.hpp"

namespace bwsim {

PeriodBeginOutcome on_period_begin(CoreRegulatorState& state, const BwLockState& lock,
                                   const SystemConfig& config, SchedulerMode mode,
                                   time_us now_us) {
    PeriodBeginOutcome outcome;
    if (state.throttled) {
        outcome.was_throttled = true;
        state.throttled = false;
        SchedEntity* entity = state.current_entity;
        BWSIM_ASSERT(entity != nullptr, "regulator: throttled core without a current entity");
        BWSIM_ASSERT(entity->throttle_start.has_value(),
                     "regulator: throttled entity without a start stamp");
        const time_us delta = now_us - *entity->throttle_start;
        BWSIM_ASSERT(delta > 0 && delta <= config.regulation_period_us,
                     "regulator: throttle interval outside (0, T]");
        entity->throttle_start.reset();
        entity->throttled_this_period_us = delta;
        outcome.throttle_delta_us = delta;
        tfs_inflate(*entity, mode == SchedulerMode::Tfs ? config.tfs_rho_ppm : 0);
    }

    // Budget decision samples the lock once per period; a lock acquired
    // mid-period takes effect at the next boundary.
    const std::int64_t budget_bytes =
        lock.bwlock_val == 1 ? config.throttle_budget_bytes : config.max_budget_bytes;
    outcome.new_budget_bytes = budget_bytes;
    state.programmed_budget = budget_bytes * kMilPerByte;
    state.remaining_budget = state.programmed_budget;
    state.consumed_this_period = 0;
    state.period_index += 1;
    state.generation += 1;
    return outcome;
}

void on_budget_exhausted(CoreRegulatorState& state, time_us now_us) {
    BWSIM_ASSERT(!state.throttled, "regulator: exhaustion while already throttled");
    BWSIM_ASSERT(state.remaining_budget == 0, "regulator: exhaustion with budget left");
    SchedEntity* entity = state.current_entity;
    BWSIM_ASSERT(entity != nullptr, "regulator: exhaustion without a running entity");
    state.throttled = true;
    entity->throttle_start = now_us;
}

} // namespace bwsim
