#ifndef BWSIM_ENGINE_HPP
#define BWSIM_ENGINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bwsim/units.hpp"
#include "bwsim/workload.hpp"

namespace bwsim {

/// Event classes of the discrete-event loop. Simultaneous events are
/// processed in this order (then by insertion ordinal), which makes the
/// schedule total and deterministic: budgets are re-armed before releases,
/// releases before exhaustion checks, and completions last; the end-of-
/// simulation flush runs after everything else at its timestamp.
enum class SimEventKind {
    PeriodBegin = 0,
    JobRelease = 1,
    BudgetExhausted = 2,
    SegmentDone = 3,
    SimEnd = 4,
};

struct TraceEvent {
    time_us time = 0;
    int core = -1;  // -1: system/GPU scope
    std::string event;
    std::string task;
    std::string detail;
};

struct SimTrace {
    int format_version = 1;
    std::vector<TraceEvent> events;
};

struct JobStats {
    int job_index = 0;
    time_us release_us = 0;
    std::optional<time_us> completion_us;
    std::optional<time_us> response_us;
    bool deadline_miss = false;
    time_us cpu_us = 0;        // observed CPU compute
    time_us sync_copy_us = 0;  // observed synchronous copy wall time
    time_us gpu_us = 0;        // observed kernel + async copy wall time
};

struct RtTaskMetrics {
    Wcet nominal;
    int jobs_released = 0;
    int jobs_completed = 0;
    int deadline_misses = 0;
    std::optional<time_us> max_response_us;
    std::optional<double> slowdown;  // mean observed (C+Gm+Ge) / nominal E
    std::vector<JobStats> jobs;
};

struct BeTaskMetrics {
    time_us runtime_us = 0;
    time_us throttle_time_us = 0;
    vrun_ps lost_vruntime_ps = 0;
    vrun_ps final_vruntime_ps = 0;
    std::int64_t scheduled_periods = 0;
    std::vector<time_us> throttle_deltas_us;            // one per throttled period
    std::vector<std::pair<std::int64_t, vrun_ps>> vruntime_series;  // (period, V)
};

struct CoreMetrics {
    time_us throttle_time_us = 0;
    time_us idle_us = 0;
    std::int64_t periods = 0;
    std::vector<std::string> period_schedule;  // picked task per period, "" = idle
};

struct Metrics {
    int format_version = 1;
    time_us sim_duration_us = 0;
    SchedulerMode scheduler = SchedulerMode::Cfs;
    std::int64_t tfs_rho_ppm = 0;
    std::vector<std::string> warnings;
    std::map<std::string, RtTaskMetrics> rt_tasks;
    std::map<std::string, BeTaskMetrics> be_tasks;
    std::map<int, CoreMetrics> cores;
    time_us system_throttle_time_us = 0;
    std::int64_t trace_events = 0;
};

struct SimResult {
    SimTrace trace;
    Metrics metrics;
};

/// Runs a validated scenario over [0, sim_duration]. Deterministic: the same
/// scenario always produces byte-identical trace and metrics documents.
/// Throws ScenarioError for invalid scenarios and SimError if the event-count
/// guard trips.
SimResult run(const Scenario& scenario);

/// Per-job response times of one task; empty if the task completed no jobs.
std::vector<time_us> observed_response_times(const Metrics& metrics, const std::string& task_id);

std::string trace_to_csv(const SimTrace& trace);
std::string metrics_to_json(const Metrics& metrics);

} // namespace bwsim

#endif // BWSIM_ENGINE_HPP
