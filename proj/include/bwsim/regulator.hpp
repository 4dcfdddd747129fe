#ifndef BWSIM_REGULATOR_HPP
#define BWSIM_REGULATOR_HPP

#include <cstdint>

#include "bwsim/fair_sched.hpp"
#include "bwsim/rt_sched.hpp"
#include "bwsim/units.hpp"
#include "bwsim/workload.hpp"

namespace bwsim {

/// Per-best-effort-core bandwidth regulator state. The budget ledger is kept
/// in byte_mil so consumption over whole microseconds is exact.
struct CoreRegulatorState {
    int core_id = 0;
    bool throttled = false;
    byte_mil remaining_budget = 0;
    byte_mil programmed_budget = 0;
    std::int64_t period_index = 0;
    std::uint64_t generation = 0;   // bumps on replenish; stales pending exhaust events
    SchedEntity* current_entity = nullptr;

    byte_mil consumed_this_period = 0;
};

struct PeriodBeginOutcome {
    bool was_throttled = false;
    time_us throttle_delta_us = 0;   // delta charged to the current entity
    std::int64_t new_budget_bytes = 0;
};

/// Periodic replenishment handler. Unthrottles the core, charges the
/// throttled duration to the entity that was running, applies the fair-
/// scheduler inflation (rho 0 under plain fair scheduling), then programs
/// the new budget: the reduced threshold while the RT core's task holds the
/// bandwidth lock, effectively unlimited otherwise.
PeriodBeginOutcome on_period_begin(CoreRegulatorState& state, const BwLockState& lock,
                                   const SystemConfig& config, SchedulerMode mode,
                                   time_us now_us);

/// Budget-exhaustion handler: throttles the core for the rest of the period
/// and stamps the throttle start on the running entity.
void on_budget_exhausted(CoreRegulatorState& state, time_us now_us);

} // namespace bwsim

#endif // BWSIM_REGULATOR_HPP
