#include "bwsim/workload.hpp"

#include <set>
#include <string>

namespace bwsim {

const char* segment_kind_name(SegmentKind kind) {
    switch (kind) {
    case SegmentKind::CpuCompute: return "compute";
    case SegmentKind::SyncCopy: return "sync_copy";
    case SegmentKind::AsyncCopy: return "async_copy";
    case SegmentKind::KernelLaunch: return "kernel";
    case SegmentKind::DeviceSync: return "device_sync";
    case SegmentKind::StreamSync: return "stream_sync";
    case SegmentKind::ThreadSync: return "thread_sync";
    case SegmentKind::ConfigureCall: return "configure_call";
    }
    return "?";
}

namespace {

bool segment_has_duration(SegmentKind kind) {
    switch (kind) {
    case SegmentKind::CpuCompute:
    case SegmentKind::SyncCopy:
    case SegmentKind::AsyncCopy:
    case SegmentKind::KernelLaunch:
        return true;
    default:
        return false;
    }
}

bool segment_has_stream(SegmentKind kind) {
    switch (kind) {
    case SegmentKind::AsyncCopy:
    case SegmentKind::KernelLaunch:
    case SegmentKind::StreamSync:
        return true;
    default:
        return false;
    }
}

[[noreturn]] void invariant_error(const std::string& field, const std::string& rule) {
    throw ScenarioError(ScenarioError::Kind::Invariant, field, field + ": " + rule);
}

void validate_segments(const RtTaskSpec& task) {
    for (std::size_t i = 0; i < task.segments.size(); ++i) {
        const Segment& seg = task.segments[i];
        const std::string field =
            task.id + ".segments[" + std::to_string(i) + "]";
        if (segment_has_duration(seg.kind)) {
            if (seg.kind != SegmentKind::CpuCompute && seg.duration_us <= 0) {
                invariant_error(field, std::string(segment_kind_name(seg.kind)) +
                                           " requires a positive duration");
            }
            if (seg.duration_us < 0) {
                invariant_error(field, "negative duration");
            }
        } else if (seg.duration_us != 0) {
            invariant_error(field, std::string(segment_kind_name(seg.kind)) +
                                       " carries no duration of its own");
        }
        if (!segment_has_stream(seg.kind) && seg.stream.has_value()) {
            invariant_error(field, std::string(segment_kind_name(seg.kind)) +
                                       " does not take a stream");
        }
    }
}

} // namespace

Wcet derived_wcet(const RtTaskSpec& task) {
    Wcet w;
    for (const Segment& seg : task.segments) {
        switch (seg.kind) {
        case SegmentKind::CpuCompute: w.compute_us += seg.duration_us; break;
        case SegmentKind::SyncCopy: w.sync_copy_us += seg.duration_us; break;
        // Async copies overlap kernel execution; charge them to the GPU window.
        case SegmentKind::AsyncCopy:
        case SegmentKind::KernelLaunch: w.gpu_exec_us += seg.duration_us; break;
        default: break;
        }
    }
    w.total_us = w.compute_us + w.sync_copy_us + w.gpu_exec_us;
    return w;
}

std::vector<std::string> validate_scenario(const Scenario& scenario) {
    std::vector<std::string> warnings;
    const SystemConfig& cfg = scenario.config;

    if (cfg.n_cores < 1) invariant_error("config.n_cores", "must be >= 1");
    if (cfg.rt_core < 0 || cfg.rt_core >= cfg.n_cores) {
        invariant_error("config.rt_core", "must index one of the cores");
    }
    if (cfg.regulation_period_us <= 0) {
        invariant_error("config.regulation_period_ms", "regulation period must be > 0");
    }
    if (cfg.tick_resolution_us <= 0) {
        invariant_error("config.tick_resolution_ms", "tick resolution must be > 0");
    }
    if (cfg.throttle_budget_bytes <= 0) {
        invariant_error("config.throttle_budget_bytes", "throttle budget must be > 0");
    }
    if (cfg.max_budget_bytes <= cfg.throttle_budget_bytes) {
        invariant_error("config.max_budget_bytes",
                        "max budget must exceed the throttle budget");
    }
    if (cfg.tfs_rho_ppm < 0) {
        invariant_error("config.tfs_rho", "tfs_rho must be >= 0");
    }
    if (cfg.ceiling_priority < 2) {
        invariant_error("config.ceiling_priority", "ceiling priority must leave room below");
    }
    if (cfg.slowdown.alpha_ppm < 0) {
        invariant_error("config.slowdown.alpha", "alpha must be >= 0");
    }
    if (cfg.slowdown.bw_ref_bytes_per_ms <= 0) {
        invariant_error("config.slowdown.bw_ref_bytes_per_ms", "bw_ref must be > 0");
    }
    if (scenario.sim_duration_us < 0) {
        invariant_error("sim_duration_ms", "sim duration must be >= 0");
    }

    std::set<std::string> ids;
    for (const RtTaskSpec& task : scenario.rt_tasks) {
        if (task.id.empty()) invariant_error("rt_tasks.id", "task id must be nonempty");
        if (!ids.insert(task.id).second) {
            throw ScenarioError(ScenarioError::Kind::DuplicateId, task.id,
                                "duplicate task id: " + task.id);
        }
        if (task.period_us <= 0) {
            invariant_error(task.id + ".period_ms", "period must be > 0");
        }
        if (task.priority < 1 || task.priority >= cfg.ceiling_priority) {
            invariant_error(task.id + ".priority", "priority must lie in [1, ceiling-1]");
        }
        validate_segments(task);
        const Wcet w = derived_wcet(task);
        if (w.total_us > task.period_us) {
            warnings.push_back(task.id + ": cumulative demand exceeds the period (" +
                               std::to_string(w.total_us) + " us > " +
                               std::to_string(task.period_us) + " us)");
        }
    }
    for (const BestEffortTaskSpec& task : scenario.be_tasks) {
        if (task.id.empty()) invariant_error("be_tasks.id", "task id must be nonempty");
        if (!ids.insert(task.id).second) {
            throw ScenarioError(ScenarioError::Kind::DuplicateId, task.id,
                                "duplicate task id: " + task.id);
        }
        if (task.weight_mil <= 0) {
            invariant_error(task.id + ".weight", "weight must be > 0");
        }
        if (task.demand_bytes_per_ms < 0) {
            invariant_error(task.id + ".demand_bytes_per_ms", "demand rate must be >= 0");
        }
        if (task.core < 0 || task.core >= cfg.n_cores) {
            invariant_error(task.id + ".core", "core out of range");
        }
        if (task.core == cfg.rt_core) {
            invariant_error(task.id + ".core", "best-effort tasks may not share the RT core");
        }
        if (task.initial_vruntime_ps < 0) {
            invariant_error(task.id + ".initial_vruntime_ms", "initial vruntime must be >= 0");
        }
    }
    return warnings;
}

} // namespace bwsim
