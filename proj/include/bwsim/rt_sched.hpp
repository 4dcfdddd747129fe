#ifndef BWSIM_RT_SCHED_HPP
#define BWSIM_RT_SCHED_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bwsim/units.hpp"

namespace bwsim {

/// Global bandwidth-lock status. At most one task holds the lock; while it
/// does, its priority sits at the system ceiling and best-effort cores get
/// the reduced budget at their next period boundary.
struct BwLockState {
    std::optional<std::string> holder;
    int bwlock_val = 0;
    std::optional<int> saved_priority;
    std::set<int> active_streams;
};

/// One released job of a real-time task.
struct RtJob {
    std::string task_id;
    int task_index = 0;
    int job_index = 0;
    time_us release_us = 0;
    int priority = 1;  // base priority; the ceiling applies while locked
};

struct RtCoreState {
    std::vector<RtJob> ready;
    std::optional<RtJob> running;
    BwLockState lock;
};

int effective_priority(const RtJob& job, const BwLockState& lock, int ceiling_priority);

enum class BwCallResult {
    Acquired,
    Released,
    RejectedNotRunning,    // caller is not the task on the RT core
    IgnoredAlreadyHeld,    // acquire while holding: state untouched
    IgnoredNotHeld,        // release without holding
};

/// The bandwidth-lock system call. Only the task currently running on the
/// RT core may flip the lock; anything else is a recorded no-op. Acquire
/// saves the caller's priority and boosts it to the ceiling (realized by
/// effective_priority while the lock is held); release restores it.
/// Repeated calls in the same direction never clobber the saved priority,
/// so save/restore stays balanced.
BwCallResult sys_bwlock(const std::string& caller, int bw_val, RtCoreState& state);

/// Highest effective priority among ready + running; ties broken by release
/// time then task id. Returns the job that should occupy the core, or
/// nullopt for idle. Does not mutate state.
std::optional<RtJob> rt_pick(const RtCoreState& state, int ceiling_priority);

/// True when `challenger` should preempt `running` (strictly higher
/// effective priority; a ceiling-boosted lock holder is never preempted).
bool should_preempt(const RtJob& running, const RtJob& challenger, const BwLockState& lock,
                    int ceiling_priority);

} // namespace bwsim

#endif // BWSIM_RT_SCHED_HPP
