#include "bwsim/rt_sched.hpp"

namespace bwsim {

int effective_priority(const RtJob& job, const BwLockState& lock, int ceiling_priority) {
    if (lock.bwlock_val == 1 && lock.holder == job.task_id) return ceiling_priority;
    return job.priority;
}

BwCallResult sys_bwlock(const std::string& caller, int bw_val, RtCoreState& state) {
    // Guard: only the task currently scheduled on the RT core may flip the
    // lock; everything else is a recorded no-op.
    if (!state.running.has_value() || state.running->task_id != caller) {
        return BwCallResult::RejectedNotRunning;
    }
    BwLockState& lock = state.lock;
    if (bw_val >= 1) {
        if (lock.bwlock_val == 1) return BwCallResult::IgnoredAlreadyHeld;
        BWSIM_ASSERT(!lock.holder.has_value(), "bwlock: acquire while another task holds it");
        lock.bwlock_val = 1;
        lock.holder = caller;
        lock.saved_priority = state.running->priority;
        return BwCallResult::Acquired;
    }
    if (lock.bwlock_val == 0) return BwCallResult::IgnoredNotHeld;
    BWSIM_ASSERT(lock.holder == caller, "bwlock: release by a non-holder");
    lock.bwlock_val = 0;
    lock.holder.reset();
    lock.saved_priority.reset();
    lock.active_streams.clear();
    return BwCallResult::Released;
}

namespace {

bool job_before(const RtJob& a, const RtJob& b, const BwLockState& lock, int ceiling) {
    const int pa = effective_priority(a, lock, ceiling);
    const int pb = effective_priority(b, lock, ceiling);
    if (pa != pb) return pa > pb;
    if (a.release_us != b.release_us) return a.release_us < b.release_us;
    return a.task_id < b.task_id;
}

} // namespace

std::optional<RtJob> rt_pick(const RtCoreState& state, int ceiling_priority) {
    const RtJob* best = state.running.has_value() ? &*state.running : nullptr;
    for (const RtJob& job : state.ready) {
        if (best == nullptr || job_before(job, *best, state.lock, ceiling_priority)) {
            best = &job;
        }
    }
    if (best == nullptr) return std::nullopt;
    return *best;
}

bool should_preempt(const RtJob& running, const RtJob& challenger, const BwLockState& lock,
                    int ceiling_priority) {
    return effective_priority(challenger, lock, ceiling_priority) >
           effective_priority(running, lock, ceiling_priority);
}

} // namespace bwsim
