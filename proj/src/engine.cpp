#include "bwsim/engine.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "bwsim/contention.hpp"
#include "bwsim/fair_sched.hpp"
#include "bwsim/gpu_shim.hpp"
#include "bwsim/regulator.hpp"
#include "bwsim/rt_sched.hpp"

namespace bwsim {

namespace {

constexpr std::int64_t kEventCap = 50'000'000;

struct Event {
    time_us time = 0;
    SimEventKind kind = SimEventKind::SimEnd;
    std::uint64_t ordinal = 0;
    int arg = 0;            // task index or core id
    std::uint64_t gen = 0;  // staleness check for cancellable events
    int sub = 0;            // SegmentDone: 0 = CPU-side completion, 1 = GPU item done
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        return a.ordinal > b.ordinal;
    }
};

// A released-but-not-running job; compute progress survives preemption.
struct PendingJob {
    RtJob job;
    std::size_t seg_index = 0;
    time_us compute_remaining_us = 0;  // progress inside a partially run compute segment
};

// Ready: between segments, the dispatch loop must keep driving the job.
// Every other state is event-driven and settles the core until a
// completion or wake-up arrives.
enum class RunState { Ready, Computing, Copying, WaitingDevice, WaitingStream, FinalDrain };

struct RunningJob {
    RtJob job;
    std::size_t seg_index = 0;
    RunState state = RunState::Ready;
    time_us compute_remaining_us = 0;
    vrun_ps copy_remaining_ps = 0;
    time_us copy_start_us = 0;
    int waiting_stream = 0;
    time_us mark_us = 0;  // progress charged up to this instant
};

struct GpuItem {
    int rt_index = 0;
    int job_index = 0;
    SegmentKind kind = SegmentKind::KernelLaunch;
    int stream = 0;
    vrun_ps remaining_ps = 0;
    time_us start_us = 0;  // instant the item reached the queue head
    time_us mark_us = 0;   // progress charged up to this instant
    bool started = false;
};

struct BeCore {
    int core_id = 0;
    RunQueue queue;
    CoreRegulatorState reg;
    SchedEntity* running = nullptr;
    time_us charge_mark_us = 0;
};

class Engine {
public:
    explicit Engine(const Scenario& scenario) : scenario_(scenario) {}

    SimResult run();

private:
    // event plumbing
    void push(time_us t, SimEventKind kind, int arg = 0, std::uint64_t gen = 0, int sub = 0);
    void trace(time_us t, int core, const char* event, const std::string& task,
               std::string detail = "");

    // handlers
    void handle_period_begin(time_us now);
    void handle_job_release(time_us now, int task_index);
    void handle_budget_exhausted(time_us now, int core_id, std::uint64_t gen);
    void handle_cpu_segment_done(time_us now, std::uint64_t gen);
    void handle_gpu_item_done(time_us now, std::uint64_t gen);
    void handle_sim_end(time_us now);

    // RT core mechanics
    void dispatch_best_ready(time_us now);
    void advance_running(time_us now);
    void complete_job(time_us now);
    void apply_shim_step(time_us now, const ShimStep& step, const std::string& task_id);
    void preempt_running(time_us now);
    bool task_has_pending_gpu_work(int rt_index) const;
    bool stream_has_pending_gpu_work(int rt_index, int stream) const;

    // GPU + slowdown
    void refresh_rates(time_us now);
    void charge_gpu_head(time_us now);
    void schedule_gpu_head(time_us now);
    void charge_copy(time_us now);
    void schedule_copy(time_us now);

    // metrics
    JobStats& job_stats(int rt_index, int job_index);
    BeCore* be_core(int core_id);
    std::int64_t aggregate_demand() const;
    void sample_vruntimes(std::int64_t period);
    void finalize_metrics();

    const Scenario& scenario_;
    SimTrace trace_;
    Metrics metrics_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::uint64_t next_ordinal_ = 0;
    std::int64_t processed_ = 0;

    // RT core
    std::vector<PendingJob> ready_;
    std::optional<RunningJob> running_;
    BwLockState lock_;
    std::vector<StreamTracker> trackers_;  // one per RT task
    std::uint64_t rt_gen_ = 0;             // pending CPU-side completion event

    // GPU FIFO
    std::deque<GpuItem> gpu_queue_;
    std::uint64_t gpu_gen_ = 0;

    // best-effort cores
    std::vector<BeCore> be_cores_;

    std::int64_t current_u_ = 0;
    SlowdownFactor factor_{1, 1};
};

void Engine::push(time_us t, SimEventKind kind, int arg, std::uint64_t gen, int sub) {
    events_.push(Event{t, kind, next_ordinal_++, arg, gen, sub});
}

void Engine::trace(time_us t, int core, const char* event, const std::string& task,
                   std::string detail) {
    trace_.events.push_back(TraceEvent{t, core, event, task, std::move(detail)});
}

BeCore* Engine::be_core(int core_id) {
    for (BeCore& core : be_cores_) {
        if (core.core_id == core_id) return &core;
    }
    return nullptr;
}

JobStats& Engine::job_stats(int rt_index, int job_index) {
    RtTaskMetrics& tm = metrics_.rt_tasks.at(scenario_.rt_tasks[rt_index].id);
    for (JobStats& stats : tm.jobs) {
        if (stats.job_index == job_index) return stats;
    }
    BWSIM_ASSERT(false, "job stats missing");
    return tm.jobs.front();
}

std::int64_t Engine::aggregate_demand() const {
    std::int64_t u = 0;
    for (const BeCore& core : be_cores_) {
        if (core.running != nullptr && !core.reg.throttled) {
            u += core.running->demand_bytes_per_ms;
        }
    }
    return u;
}

bool Engine::task_has_pending_gpu_work(int rt_index) const {
    for (const GpuItem& item : gpu_queue_) {
        if (item.rt_index == rt_index) return true;
    }
    return false;
}

bool Engine::stream_has_pending_gpu_work(int rt_index, int stream) const {
    for (const GpuItem& item : gpu_queue_) {
        if (item.rt_index == rt_index && item.stream == stream) return true;
    }
    return false;
}

void Engine::charge_gpu_head(time_us now) {
    if (gpu_queue_.empty() || !gpu_queue_.front().started) return;
    GpuItem& head = gpu_queue_.front();
    head.remaining_ps -= slowed_progress_ps(now - head.mark_us, factor_);
    if (head.remaining_ps < 0) head.remaining_ps = 0;
    head.mark_us = now;
}

void Engine::schedule_gpu_head(time_us now) {
    if (gpu_queue_.empty()) return;
    GpuItem& head = gpu_queue_.front();
    if (!head.started) {
        head.started = true;
        head.start_us = now;
        head.mark_us = now;
        const RtTaskSpec& task = scenario_.rt_tasks[head.rt_index];
        trace(now, -1, "gpu_start", task.id,
              std::string("kind=") + segment_kind_name(head.kind) +
                  ";stream=" + std::to_string(head.stream));
    }
    gpu_gen_ += 1;
    push(now + slowed_completion_us(head.remaining_ps, factor_), SimEventKind::SegmentDone,
         0, gpu_gen_, 1);
}

void Engine::charge_copy(time_us now) {
    if (!running_.has_value() || running_->state != RunState::Copying) return;
    running_->copy_remaining_ps -= slowed_progress_ps(now - running_->mark_us, factor_);
    if (running_->copy_remaining_ps < 0) running_->copy_remaining_ps = 0;
    running_->mark_us = now;
}

void Engine::schedule_copy(time_us now) {
    rt_gen_ += 1;
    push(now + slowed_completion_us(running_->copy_remaining_ps, factor_),
         SimEventKind::SegmentDone, 0, rt_gen_, 0);
}

void Engine::refresh_rates(time_us now) {
    const std::int64_t u = aggregate_demand();
    if (u == current_u_) return;
    // Charge in-flight memory work at the old factor before switching.
    charge_gpu_head(now);
    charge_copy(now);
    current_u_ = u;
    factor_ = gpu_slowdown_factor(u, scenario_.config.slowdown);
    if (!gpu_queue_.empty() && gpu_queue_.front().started) schedule_gpu_head(now);
    if (running_.has_value() && running_->state == RunState::Copying) schedule_copy(now);
}

void Engine::apply_shim_step(time_us now, const ShimStep& step, const std::string& task_id) {
    for (int stream : step.activated) {
        lock_.active_streams.insert(stream);
        trace(now, scenario_.config.rt_core, "stream_activate", task_id,
              "stream=" + std::to_string(stream));
    }
    for (int stream : step.retired) {
        lock_.active_streams.erase(stream);
        trace(now, scenario_.config.rt_core, "stream_retire", task_id,
              "stream=" + std::to_string(stream));
    }
    if (step.inactive_stream_warning) {
        trace(now, scenario_.config.rt_core, "stream_sync_inactive", task_id);
    }
    for (LockAction action : step.actions) {
        RtCoreState view;
        view.running = running_->job;
        view.lock = lock_;
        const BwCallResult result =
            sys_bwlock(task_id, action == LockAction::Acquire ? 1 : 0, view);
        lock_ = view.lock;
        if (result == BwCallResult::Acquired) {
            trace(now, scenario_.config.rt_core, "bwlock_acquire", task_id);
            trace(now, scenario_.config.rt_core, "prio_boost", task_id,
                  "from=" + std::to_string(*lock_.saved_priority) +
                      ";to=" + std::to_string(scenario_.config.ceiling_priority));
        } else if (result == BwCallResult::Released) {
            trace(now, scenario_.config.rt_core, "bwlock_release", task_id);
            trace(now, scenario_.config.rt_core, "prio_restore", task_id,
                  "to=" + std::to_string(running_->job.priority));
        } else {
            trace(now, scenario_.config.rt_core, "bwlock_rejected", task_id,
                  "reason=not_running");
        }
    }
}

// Moves the best ready job onto the core, state Ready; the caller's
// advance_running loop keeps driving it.
void Engine::dispatch_best_ready(time_us now) {
    if (ready_.empty()) return;
    std::size_t best = 0;
    for (std::size_t i = 1; i < ready_.size(); ++i) {
        const RtJob& a = ready_[i].job;
        const RtJob& b = ready_[best].job;
        const bool before = a.priority != b.priority ? a.priority > b.priority
                            : a.release_us != b.release_us ? a.release_us < b.release_us
                                                           : a.task_id < b.task_id;
        if (before) best = i;
    }
    PendingJob pending = std::move(ready_[best]);
    ready_.erase(ready_.begin() + static_cast<std::ptrdiff_t>(best));
    running_ = RunningJob{};
    running_->job = pending.job;
    running_->seg_index = pending.seg_index;
    running_->compute_remaining_us = pending.compute_remaining_us;
    running_->mark_us = now;
    trace(now, scenario_.config.rt_core, "rt_dispatch", running_->job.task_id,
          "job=" + std::to_string(running_->job.job_index));
}

void Engine::preempt_running(time_us now) {
    BWSIM_ASSERT(running_.has_value(), "preempt without a running job");
    BWSIM_ASSERT(running_->state == RunState::Computing,
                 "preempted job must be in a plain compute segment");
    BWSIM_ASSERT(lock_.holder != running_->job.task_id, "preempted a lock holder");
    const time_us ran = now - running_->mark_us;
    running_->compute_remaining_us -= ran;
    job_stats(running_->job.task_index, running_->job.job_index).cpu_us += ran;
    rt_gen_ += 1;  // cancel the pending completion
    if (running_->compute_remaining_us == 0) {
        // The segment ends exactly at the preemption instant (releases order
        // before completions); settle it so zero-time work is not replayed.
        running_->seg_index += 1;
        running_->state = RunState::Ready;
        advance_running(now);
        return;
    }
    trace(now, scenario_.config.rt_core, "rt_preempt", running_->job.task_id,
          "job=" + std::to_string(running_->job.job_index));
    ready_.push_back(PendingJob{running_->job, running_->seg_index,
                                running_->compute_remaining_us});
    running_.reset();
}

void Engine::complete_job(time_us now) {
    const RtJob job = running_->job;
    const RtTaskSpec& task = scenario_.rt_tasks[job.task_index];
    RtTaskMetrics& tm = metrics_.rt_tasks.at(task.id);
    JobStats& stats = job_stats(job.task_index, job.job_index);
    stats.completion_us = now;
    stats.response_us = now - job.release_us;
    tm.jobs_completed += 1;
    if (!tm.max_response_us.has_value() || *stats.response_us > *tm.max_response_us) {
        tm.max_response_us = *stats.response_us;
    }
    if (*stats.response_us > task.period_us) {
        stats.deadline_miss = true;
        tm.deadline_misses += 1;
        trace(now, scenario_.config.rt_core, "deadline_miss", task.id,
              "job=" + std::to_string(job.job_index) +
                  ";response_us=" + std::to_string(*stats.response_us));
    }
    trace(now, scenario_.config.rt_core, "job_complete", task.id,
          "job=" + std::to_string(job.job_index) +
              ";response_us=" + std::to_string(*stats.response_us));
    running_.reset();
}

void Engine::advance_running(time_us now) {
    const int rt_core = scenario_.config.rt_core;
    while (running_.has_value() && running_->state == RunState::Ready) {
        RunningJob& run = *running_;
        const RtTaskSpec& task = scenario_.rt_tasks[run.job.task_index];
        StreamTracker& tracker = trackers_[static_cast<std::size_t>(run.job.task_index)];

        if (run.seg_index >= task.segments.size()) {
            // End of program: pending GPU work drains implicitly, as at
            // process teardown. A lock still held here is a dangling hold.
            if (task_has_pending_gpu_work(run.job.task_index)) {
                run.state = RunState::FinalDrain;
                return;
            }
            if (tracker.lock_held()) {
                trace(now, rt_core, "dangling_lock_released", task.id);
                apply_shim_step(now, tracker.force_drain(), task.id);
            }
            complete_job(now);
            dispatch_best_ready(now);
            continue;
        }

        // A waiting higher-priority job takes the core between segments;
        // this is where a job preempted away from a lock release lands.
        if (!ready_.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < ready_.size(); ++i) {
                if (ready_[i].job.priority > ready_[best].job.priority) best = i;
            }
            if (should_preempt(run.job, ready_[best].job, lock_,
                               scenario_.config.ceiling_priority)) {
                trace(now, rt_core, "rt_preempt", run.job.task_id,
                      "job=" + std::to_string(run.job.job_index));
                ready_.push_back(
                    PendingJob{run.job, run.seg_index, run.compute_remaining_us});
                running_.reset();
                dispatch_best_ready(now);
                continue;
            }
        }

        const Segment& seg = task.segments[run.seg_index];
        switch (seg.kind) {
        case SegmentKind::CpuCompute: {
            if (run.compute_remaining_us == 0) run.compute_remaining_us = seg.duration_us;
            if (run.compute_remaining_us == 0) {  // zero-length segment
                run.seg_index += 1;
                continue;
            }
            run.state = RunState::Computing;
            run.mark_us = now;
            rt_gen_ += 1;
            push(now + run.compute_remaining_us, SimEventKind::SegmentDone, 0, rt_gen_, 0);
            return;
        }

        case SegmentKind::SyncCopy: {
            trace(now, rt_core, "api_call", task.id, "kind=memcpy");
            if (auto action = tracker.begin_sync_copy()) {
                ShimStep step;
                step.actions.push_back(*action);
                apply_shim_step(now, step, task.id);
            }
            trace(now, rt_core, "copy_start", task.id,
                  "us=" + std::to_string(seg.duration_us));
            run.state = RunState::Copying;
            run.copy_remaining_ps = seg.duration_us * kPsPerUs;
            run.copy_start_us = now;
            run.mark_us = now;
            schedule_copy(now);
            return;
        }

        case SegmentKind::AsyncCopy:
        case SegmentKind::KernelLaunch: {
            const ApiEvent event = *segment_api_event(seg);
            trace(now, rt_core, "api_call", task.id,
                  std::string("kind=") + api_kind_name(event.kind) +
                      ";stream=" + std::to_string(seg.stream.value_or(0)));
            apply_shim_step(now, tracker.on_api_event(event), task.id);
            GpuItem item;
            item.rt_index = run.job.task_index;
            item.job_index = run.job.job_index;
            item.kind = seg.kind;
            item.stream = seg.stream.value_or(0);
            item.remaining_ps = seg.duration_us * kPsPerUs;
            if (!gpu_queue_.empty()) {
                BWSIM_ASSERT(gpu_queue_.front().rt_index == item.rt_index,
                             "GPU queue spans two tasks; the lock must serialize them");
            }
            gpu_queue_.push_back(item);
            if (gpu_queue_.size() == 1) schedule_gpu_head(now);
            run.seg_index += 1;
            continue;
        }

        case SegmentKind::DeviceSync:
        case SegmentKind::ThreadSync: {
            const ApiEvent event = *segment_api_event(seg);
            trace(now, rt_core, "api_call", task.id,
                  std::string("kind=") + api_kind_name(event.kind));
            if (task_has_pending_gpu_work(run.job.task_index)) {
                run.state = RunState::WaitingDevice;
                return;  // tracker transition fires when the queue drains
            }
            apply_shim_step(now, tracker.on_api_event(event), task.id);
            run.seg_index += 1;
            continue;
        }

        case SegmentKind::StreamSync: {
            const int stream = seg.stream.value_or(0);
            trace(now, rt_core, "api_call", task.id,
                  std::string("kind=stream_sync;stream=") + std::to_string(stream));
            if (tracker.active_streams().count(stream) != 0 &&
                stream_has_pending_gpu_work(run.job.task_index, stream)) {
                run.state = RunState::WaitingStream;
                run.waiting_stream = stream;
                return;
            }
            apply_shim_step(now, tracker.on_api_event(*segment_api_event(seg)), task.id);
            run.seg_index += 1;
            continue;
        }

        case SegmentKind::ConfigureCall: {
            trace(now, rt_core, "api_call", task.id, "kind=configure_call");
            apply_shim_step(now, tracker.on_api_event(*segment_api_event(seg)), task.id);
            run.seg_index += 1;
            continue;
        }
        }
    }
}

void Engine::handle_period_begin(time_us now) {
    const SystemConfig& cfg = scenario_.config;
    const std::int64_t period = now / cfg.regulation_period_us;
    if (now + cfg.regulation_period_us < scenario_.sim_duration_us) {
        push(now + cfg.regulation_period_us, SimEventKind::PeriodBegin);
    }

    // Phase 1: every core's regulator fires before any scheduling decision.
    for (BeCore& core : be_cores_) {
        if (core.running != nullptr && !core.reg.throttled) {
            const time_us ran = now - core.charge_mark_us;
            charge_runtime(*core.running, ran);
            const byte_mil used = consumed_mil(core.running->demand_bytes_per_ms, ran,
                                               core.reg.remaining_budget);
            core.reg.remaining_budget -= used;
            core.reg.consumed_this_period += used;
            BWSIM_ASSERT(core.reg.consumed_this_period <= core.reg.programmed_budget,
                         "budget conservation violated");
        }
        const PeriodBeginOutcome outcome =
            on_period_begin(core.reg, lock_, cfg, scenario_.scheduler, now);
        if (outcome.was_throttled) {
            const std::string& id = core.running->task_id;
            trace(now, core.core_id, "unthrottle", id,
                  "delta_us=" + std::to_string(outcome.throttle_delta_us));
            metrics_.cores.at(core.core_id).throttle_time_us += outcome.throttle_delta_us;
            BeTaskMetrics& bm = metrics_.be_tasks.at(id);
            bm.throttle_time_us += outcome.throttle_delta_us;
            bm.throttle_deltas_us.push_back(outcome.throttle_delta_us);
            if (scenario_.scheduler == SchedulerMode::Tfs) {
                bm.lost_vruntime_ps += outcome.throttle_delta_us * cfg.tfs_rho_ppm;
            }
        }
        trace(now, core.core_id, "period_begin", "",
              "budget_bytes=" + std::to_string(outcome.new_budget_bytes));
        metrics_.cores.at(core.core_id).periods += 1;
    }

    sample_vruntimes(period);

    // Phase 2: scheduling decisions, then exhaust arming, per core in order.
    for (BeCore& core : be_cores_) {
        SchedEntity* picked = core.queue.pick_next();
        if (picked != core.running) {
            core.running = picked;
            if (picked != nullptr) {
                trace(now, core.core_id, "be_dispatch", picked->task_id,
                      "vruntime_ps=" + std::to_string(picked->vruntime));
            }
        }
        core.reg.current_entity = picked;
        core.charge_mark_us = now;
        CoreMetrics& cm = metrics_.cores.at(core.core_id);
        if (picked != nullptr) {
            cm.period_schedule.push_back(picked->task_id);
            metrics_.be_tasks.at(picked->task_id).scheduled_periods += 1;
        } else {
            cm.period_schedule.push_back("");
            cm.idle_us += std::min(now + cfg.regulation_period_us, scenario_.sim_duration_us) - now;
        }
        if (picked != nullptr && picked->demand_bytes_per_ms > 0) {
            const time_us delay =
                exhaust_delay_us(picked->demand_bytes_per_ms, core.reg.remaining_budget);
            if (delay < cfg.regulation_period_us &&
                now + delay < scenario_.sim_duration_us) {
                push(now + delay, SimEventKind::BudgetExhausted, core.core_id,
                     core.reg.generation);
            }
        }
    }

    refresh_rates(now);
}

void Engine::handle_job_release(time_us now, int task_index) {
    const RtTaskSpec& task = scenario_.rt_tasks[static_cast<std::size_t>(task_index)];
    RtTaskMetrics& tm = metrics_.rt_tasks.at(task.id);
    RtJob job;
    job.task_id = task.id;
    job.task_index = task_index;
    job.job_index = tm.jobs_released;
    job.release_us = now;
    job.priority = task.priority;
    tm.jobs_released += 1;
    JobStats stats;
    stats.job_index = job.job_index;
    stats.release_us = now;
    tm.jobs.push_back(stats);
    trace(now, scenario_.config.rt_core, "job_release", task.id,
          "job=" + std::to_string(job.job_index));

    const time_us next = now + task.period_us;
    if (next < scenario_.sim_duration_us) {
        push(next, SimEventKind::JobRelease, task_index);
    }

    ready_.push_back(PendingJob{job, 0, 0});
    if (running_.has_value() &&
        should_preempt(running_->job, job, lock_, scenario_.config.ceiling_priority)) {
        preempt_running(now);
    }
    if (!running_.has_value()) {
        dispatch_best_ready(now);
        advance_running(now);
    }
}

void Engine::handle_budget_exhausted(time_us now, int core_id, std::uint64_t gen) {
    BeCore* core = be_core(core_id);
    BWSIM_ASSERT(core != nullptr, "exhaustion on an unknown core");
    if (gen != core->reg.generation) return;  // stale: budget was replenished
    BWSIM_ASSERT(core->running != nullptr, "exhaustion without a running entity");

    const time_us ran = now - core->charge_mark_us;
    charge_runtime(*core->running, ran);
    const byte_mil used =
        consumed_mil(core->running->demand_bytes_per_ms, ran, core->reg.remaining_budget);
    core->reg.remaining_budget -= used;
    core->reg.consumed_this_period += used;
    BWSIM_ASSERT(core->reg.remaining_budget == 0, "exhaustion fired with budget left");
    core->charge_mark_us = now;

    on_budget_exhausted(core->reg, now);
    trace(now, core_id, "throttle", core->running->task_id,
          "consumed_bytes=" + std::to_string(core->reg.consumed_this_period / kMilPerByte));
    refresh_rates(now);
}

void Engine::handle_cpu_segment_done(time_us now, std::uint64_t gen) {
    if (gen != rt_gen_ || !running_.has_value()) return;
    RunningJob& run = *running_;
    const RtTaskSpec& task = scenario_.rt_tasks[run.job.task_index];
    StreamTracker& tracker = trackers_[static_cast<std::size_t>(run.job.task_index)];
    JobStats& stats = job_stats(run.job.task_index, run.job.job_index);

    if (run.state == RunState::Computing) {
        stats.cpu_us += now - run.mark_us;
        run.compute_remaining_us = 0;
        run.seg_index += 1;
    } else if (run.state == RunState::Copying) {
        stats.sync_copy_us += now - run.copy_start_us;
        run.copy_remaining_ps = 0;
        trace(now, scenario_.config.rt_core, "copy_done", task.id);
        if (auto action = tracker.end_sync_copy()) {
            ShimStep step;
            step.actions.push_back(*action);
            apply_shim_step(now, step, task.id);
        }
        run.seg_index += 1;
    } else {
        BWSIM_ASSERT(false, "segment completion in a non-running state");
    }
    run.state = RunState::Ready;
    advance_running(now);
}

void Engine::handle_gpu_item_done(time_us now, std::uint64_t gen) {
    if (gen != gpu_gen_) return;
    BWSIM_ASSERT(!gpu_queue_.empty(), "GPU completion with an empty queue");
    GpuItem item = gpu_queue_.front();
    gpu_queue_.pop_front();
    const RtTaskSpec& task = scenario_.rt_tasks[item.rt_index];
    trace(now, -1, "gpu_done", task.id,
          std::string("kind=") + segment_kind_name(item.kind) +
              ";stream=" + std::to_string(item.stream));
    job_stats(item.rt_index, item.job_index).gpu_us += now - item.start_us;
    schedule_gpu_head(now);

    if (!running_.has_value()) return;
    RunningJob& run = *running_;
    if (run.job.task_index != item.rt_index) return;
    StreamTracker& tracker = trackers_[static_cast<std::size_t>(item.rt_index)];

    if (run.state == RunState::WaitingDevice && !task_has_pending_gpu_work(item.rt_index)) {
        const Segment& seg = task.segments[run.seg_index];
        apply_shim_step(now, tracker.on_api_event(*segment_api_event(seg)), task.id);
        run.seg_index += 1;
        run.state = RunState::Ready;
        advance_running(now);
    } else if (run.state == RunState::WaitingStream &&
               !stream_has_pending_gpu_work(item.rt_index, run.waiting_stream)) {
        const Segment& seg = task.segments[run.seg_index];
        apply_shim_step(now, tracker.on_api_event(*segment_api_event(seg)), task.id);
        run.seg_index += 1;
        run.state = RunState::Ready;
        advance_running(now);
    } else if (run.state == RunState::FinalDrain && !task_has_pending_gpu_work(item.rt_index)) {
        run.state = RunState::Ready;
        advance_running(now);
    }
}

void Engine::sample_vruntimes(std::int64_t period) {
    for (BeCore& core : be_cores_) {
        for (const SchedEntity& entity : core.queue.entities()) {
            metrics_.be_tasks.at(entity.task_id)
                .vruntime_series.emplace_back(period, entity.vruntime);
        }
    }
}

void Engine::handle_sim_end(time_us now) {
    const SystemConfig& cfg = scenario_.config;
    const bool on_boundary = now % cfg.regulation_period_us == 0;
    for (BeCore& core : be_cores_) {
        if (core.reg.throttled) {
            SchedEntity* entity = core.reg.current_entity;
            const time_us delta = now - *entity->throttle_start;
            entity->throttle_start.reset();
            metrics_.cores.at(core.core_id).throttle_time_us += delta;
            BeTaskMetrics& bm = metrics_.be_tasks.at(entity->task_id);
            bm.throttle_time_us += delta;
            bm.throttle_deltas_us.push_back(delta);
            trace(now, core.core_id, "unthrottle", entity->task_id,
                  "delta_us=" + std::to_string(delta));
            // The end of the run only closes the books; inflation belongs to
            // period boundaries, which this is only when D is a multiple of T.
            if (on_boundary) {
                entity->throttled_this_period_us = delta;
                tfs_inflate(*entity,
                            scenario_.scheduler == SchedulerMode::Tfs ? cfg.tfs_rho_ppm : 0);
                if (scenario_.scheduler == SchedulerMode::Tfs) {
                    bm.lost_vruntime_ps += delta * cfg.tfs_rho_ppm;
                }
            }
        } else if (core.running != nullptr) {
            const time_us ran = now - core.charge_mark_us;
            charge_runtime(*core.running, ran);
            const byte_mil used = consumed_mil(core.running->demand_bytes_per_ms, ran,
                                               core.reg.remaining_budget);
            core.reg.remaining_budget -= used;
            core.reg.consumed_this_period += used;
        }
    }
    if (on_boundary && now > 0) sample_vruntimes(now / cfg.regulation_period_us);
    trace(now, -1, "sim_end", "");
}

void Engine::finalize_metrics() {
    for (BeCore& core : be_cores_) {
        for (const SchedEntity& entity : core.queue.entities()) {
            BeTaskMetrics& bm = metrics_.be_tasks.at(entity.task_id);
            bm.runtime_us = entity.accumulated_runtime_us;
            bm.final_vruntime_ps = entity.vruntime;
        }
        metrics_.system_throttle_time_us += metrics_.cores.at(core.core_id).throttle_time_us;
    }
    for (const RtTaskSpec& task : scenario_.rt_tasks) {
        RtTaskMetrics& tm = metrics_.rt_tasks.at(task.id);
        if (tm.nominal.total_us > 0 && tm.jobs_completed > 0) {
            double observed = 0;
            for (const JobStats& stats : tm.jobs) {
                if (!stats.completion_us.has_value()) continue;
                observed += static_cast<double>(stats.cpu_us + stats.sync_copy_us + stats.gpu_us);
            }
            tm.slowdown = observed / static_cast<double>(tm.jobs_completed) /
                          static_cast<double>(tm.nominal.total_us);
        }
    }
    metrics_.trace_events = static_cast<std::int64_t>(trace_.events.size());
}

SimResult Engine::run() {
    const SystemConfig& cfg = scenario_.config;
    metrics_.sim_duration_us = scenario_.sim_duration_us;
    metrics_.scheduler = scenario_.scheduler;
    metrics_.tfs_rho_ppm = cfg.tfs_rho_ppm;
    metrics_.warnings = validate_scenario(scenario_);

    trackers_.resize(scenario_.rt_tasks.size());
    for (const RtTaskSpec& task : scenario_.rt_tasks) {
        RtTaskMetrics tm;
        tm.nominal = derived_wcet(task);
        metrics_.rt_tasks.emplace(task.id, std::move(tm));
    }
    for (int core_id = 0; core_id < cfg.n_cores; ++core_id) {
        if (core_id == cfg.rt_core) continue;
        BeCore core;
        core.core_id = core_id;
        core.reg.core_id = core_id;
        be_cores_.push_back(std::move(core));
        metrics_.cores.emplace(core_id, CoreMetrics{});
    }
    for (const BestEffortTaskSpec& spec : scenario_.be_tasks) {
        BeCore* core = be_core(spec.core);
        BWSIM_ASSERT(core != nullptr, "best-effort task on an unknown core");
        core->queue.add(make_entity(spec));
        metrics_.be_tasks.emplace(spec.id, BeTaskMetrics{});
    }

    if (scenario_.sim_duration_us > 0) {
        push(0, SimEventKind::PeriodBegin);
        for (std::size_t i = 0; i < scenario_.rt_tasks.size(); ++i) {
            push(0, SimEventKind::JobRelease, static_cast<int>(i));
        }
    }
    push(scenario_.sim_duration_us, SimEventKind::SimEnd);

    while (!events_.empty()) {
        const Event event = events_.top();
        events_.pop();
        processed_ += 1;
        if (processed_ > kEventCap) {
            throw SimError("event cap exceeded; the scenario generates an event storm");
        }
        BWSIM_ASSERT(event.time <= scenario_.sim_duration_us, "event beyond the horizon");
        switch (event.kind) {
        case SimEventKind::PeriodBegin: handle_period_begin(event.time); break;
        case SimEventKind::JobRelease: handle_job_release(event.time, event.arg); break;
        case SimEventKind::BudgetExhausted:
            handle_budget_exhausted(event.time, event.arg, event.gen);
            break;
        case SimEventKind::SegmentDone:
            if (event.sub == 0) {
                handle_cpu_segment_done(event.time, event.gen);
            } else {
                handle_gpu_item_done(event.time, event.gen);
            }
            break;
        case SimEventKind::SimEnd: handle_sim_end(event.time); break;
        }
        if (event.kind == SimEventKind::SimEnd) break;
    }

    finalize_metrics();
    return SimResult{std::move(trace_), std::move(metrics_)};
}

} // namespace

SimResult run(const Scenario& scenario) {
    Engine engine(scenario);
    return engine.run();
}

std::vector<time_us> observed_response_times(const Metrics& metrics, const std::string& task_id) {
    std::vector<time_us> responses;
    auto it = metrics.rt_tasks.find(task_id);
    if (it == metrics.rt_tasks.end()) return responses;
    for (const JobStats& stats : it->second.jobs) {
        if (stats.response_us.has_value()) responses.push_back(*stats.response_us);
    }
    return responses;
}

std::string trace_to_csv(const SimTrace& trace) {
    std::ostringstream out;
    out << "# bwsim trace format_version=" << trace.format_version << "\n";
    out << "time_us,core,event,task,detail\n";
    for (const TraceEvent& event : trace.events) {
        out << event.time << ',' << event.core << ',' << event.event << ',' << event.task
            << ',' << event.detail << '\n';
    }
    return out.str();
}

std::string metrics_to_json(const Metrics& metrics) {
    nlohmann::json doc;
    doc["format_version"] = metrics.format_version;
    doc["sim_duration_us"] = metrics.sim_duration_us;
    doc["scheduler"] = metrics.scheduler == SchedulerMode::Cfs ? "cfs" : "tfs";
    doc["tfs_rho"] = from_ppm(metrics.tfs_rho_ppm);
    doc["warnings"] = metrics.warnings;
    doc["system"] = {{"throttle_time_us", metrics.system_throttle_time_us},
                     {"trace_events", metrics.trace_events}};

    nlohmann::json cores = nlohmann::json::object();
    for (const auto& [core_id, cm] : metrics.cores) {
        nlohmann::json entry;
        entry["throttle_time_us"] = cm.throttle_time_us;
        entry["idle_us"] = cm.idle_us;
        entry["periods"] = cm.periods;
        entry["period_schedule"] = cm.period_schedule;
        cores[std::to_string(core_id)] = entry;
    }
    doc["cores"] = cores;

    nlohmann::json rt = nlohmann::json::object();
    for (const auto& [id, tm] : metrics.rt_tasks) {
        nlohmann::json entry;
        entry["nominal"] = {{"compute_us", tm.nominal.compute_us},
                            {"sync_copy_us", tm.nominal.sync_copy_us},
                            {"gpu_exec_us", tm.nominal.gpu_exec_us},
                            {"total_us", tm.nominal.total_us}};
        entry["jobs_released"] = tm.jobs_released;
        entry["jobs_completed"] = tm.jobs_completed;
        entry["deadline_misses"] = tm.deadline_misses;
        if (tm.max_response_us.has_value()) {
            entry["max_response_us"] = *tm.max_response_us;
        } else {
            entry["max_response_us"] = nullptr;
        }
        if (tm.slowdown.has_value()) {
            entry["slowdown"] = *tm.slowdown;
        } else {
            entry["slowdown"] = nullptr;
        }
        nlohmann::json jobs = nlohmann::json::array();
        for (const JobStats& stats : tm.jobs) {
            nlohmann::json job;
            job["job"] = stats.job_index;
            job["release_us"] = stats.release_us;
            job["completion_us"] =
                stats.completion_us.has_value() ? nlohmann::json(*stats.completion_us)
                                                : nlohmann::json(nullptr);
            job["response_us"] = stats.response_us.has_value()
                                     ? nlohmann::json(*stats.response_us)
                                     : nlohmann::json(nullptr);
            job["deadline_miss"] = stats.deadline_miss;
            job["cpu_us"] = stats.cpu_us;
            job["sync_copy_us"] = stats.sync_copy_us;
            job["gpu_us"] = stats.gpu_us;
            jobs.push_back(job);
        }
        entry["jobs"] = jobs;
        rt[id] = entry;
    }
    doc["rt_tasks"] = rt;

    nlohmann::json be = nlohmann::json::object();
    for (const auto& [id, bm] : metrics.be_tasks) {
        nlohmann::json entry;
        entry["runtime_us"] = bm.runtime_us;
        entry["throttle_time_us"] = bm.throttle_time_us;
        entry["lost_vruntime_ms"] = ps_to_ms(bm.lost_vruntime_ps);
        entry["final_vruntime_ms"] = ps_to_ms(bm.final_vruntime_ps);
        entry["scheduled_periods"] = bm.scheduled_periods;
        entry["throttle_deltas_us"] = bm.throttle_deltas_us;
        nlohmann::json series = nlohmann::json::array();
        for (const auto& [period, vruntime] : bm.vruntime_series) {
            series.push_back({period, ps_to_ms(vruntime)});
        }
        entry["vruntime_series"] = series;
        be[id] = entry;
    }
    doc["be_tasks"] = be;

    return doc.dump(2) + "\n";
}

} // namespace bwsim
