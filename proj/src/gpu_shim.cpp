#include "bwsim/gpu_shim.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace bwsim {

const char* api_kind_name(ApiKind kind) {
    switch (kind) {
    case ApiKind::ConfigureCall: return "configure_call";
    case ApiKind::Memcpy: return "memcpy";
    case ApiKind::MemcpyAsync: return "memcpy_async";
    case ApiKind::Launch: return "launch";
    case ApiKind::DeviceSync: return "device_sync";
    case ApiKind::ThreadSync: return "thread_sync";
    case ApiKind::StreamSync: return "stream_sync";
    }
    return "?";
}

void StreamTracker::acquire_if_needed(ShimStep& step) {
    if (lock_held_) return;
    lock_held_ = true;
    step.actions.push_back(LockAction::Acquire);
}

void StreamTracker::release(ShimStep& step) {
    BWSIM_ASSERT(lock_held_, "shim: release without holding the lock");
    lock_held_ = false;
    step.actions.push_back(LockAction::Release);
}

void StreamTracker::activate(int stream, ShimStep& step) {
    if (active_.insert(stream).second) step.activated.push_back(stream);
}

ShimStep StreamTracker::on_api_event(const ApiEvent& event) {
    ShimStep step;
    switch (event.kind) {
    case ApiKind::ConfigureCall:
        pending_launch_stream_ = event.stream.value_or(0);
        break;

    case ApiKind::Memcpy: {
        if (auto action = begin_sync_copy()) step.actions.push_back(*action);
        if (auto action = end_sync_copy()) step.actions.push_back(*action);
        break;
    }

    case ApiKind::MemcpyAsync: {
        acquire_if_needed(step);
        activate(event.stream.value_or(0), step);
        break;
    }

    case ApiKind::Launch: {
        const int stream =
            event.stream.has_value() ? *event.stream : pending_launch_stream_.value_or(0);
        pending_launch_stream_.reset();
        step.effective_stream = stream;
        acquire_if_needed(step);
        activate(stream, step);
        break;
    }

    case ApiKind::DeviceSync:
    case ApiKind::ThreadSync: {
        for (int s : active_) step.retired.push_back(s);
        active_.clear();
        if (lock_held_ && !in_sync_copy_) release(step);
        break;
    }

    case ApiKind::StreamSync: {
        const int stream = event.stream.value_or(0);
        if (active_.erase(stream) == 0) {
            step.inactive_stream_warning = true;
            break;
        }
        step.retired.push_back(stream);
        if (active_.empty() && lock_held_ && !in_sync_copy_) release(step);
        break;
    }
    }
    return step;
}

std::optional<LockAction> StreamTracker::begin_sync_copy() {
    BWSIM_ASSERT(!in_sync_copy_, "shim: nested synchronous copy");
    in_sync_copy_ = true;
    if (lock_held_) return std::nullopt;
    lock_held_ = true;
    return LockAction::Acquire;
}

std::optional<LockAction> StreamTracker::end_sync_copy() {
    BWSIM_ASSERT(in_sync_copy_, "shim: sync-copy end without begin");
    in_sync_copy_ = false;
    if (!active_.empty()) return std::nullopt;  // lock retained for active streams
    BWSIM_ASSERT(lock_held_, "shim: lock lost during synchronous copy");
    lock_held_ = false;
    return LockAction::Release;
}

ShimStep StreamTracker::force_drain() {
    ShimStep step;
    for (int s : active_) step.retired.push_back(s);
    active_.clear();
    if (lock_held_ && !in_sync_copy_) release(step);
    return step;
}

std::optional<ApiEvent> segment_api_event(const Segment& segment) {
    switch (segment.kind) {
    case SegmentKind::CpuCompute: return std::nullopt;
    case SegmentKind::SyncCopy: return ApiEvent{ApiKind::Memcpy, std::nullopt};
    case SegmentKind::AsyncCopy: return ApiEvent{ApiKind::MemcpyAsync, segment.stream};
    case SegmentKind::KernelLaunch: return ApiEvent{ApiKind::Launch, segment.stream};
    case SegmentKind::DeviceSync: return ApiEvent{ApiKind::DeviceSync, std::nullopt};
    case SegmentKind::StreamSync: return ApiEvent{ApiKind::StreamSync, segment.stream};
    case SegmentKind::ThreadSync: return ApiEvent{ApiKind::ThreadSync, std::nullopt};
    case SegmentKind::ConfigureCall: return ApiEvent{ApiKind::ConfigureCall, std::nullopt};
    }
    return std::nullopt;
}

// Nominal single-task executor: CPU cursor plus a FIFO GPU queue. Only the
// acquire/release instants matter here, so GPU items are reduced to their
// completion times.
std::vector<LockInterval> lock_intervals(std::span<const Segment> segments) {
    std::vector<LockInterval> intervals;
    StreamTracker tracker;
    time_us cpu = 0;
    time_us gpu_free = 0;                // completion of the queue tail
    std::map<int, time_us> stream_done;  // last completion per stream
    time_us open_start = -1;             // -1: lock not held

    auto on_actions = [&](const ShimStep& step, time_us at) {
        for (LockAction action : step.actions) {
            if (action == LockAction::Acquire) {
                BWSIM_ASSERT(open_start < 0, "lock_intervals: unbalanced acquire");
                open_start = at;
            } else {
                BWSIM_ASSERT(open_start >= 0, "lock_intervals: unbalanced release");
                intervals.push_back({open_start, at});
                open_start = -1;
            }
        }
    };

    for (const Segment& seg : segments) {
        switch (seg.kind) {
        case SegmentKind::CpuCompute:
            cpu += seg.duration_us;
            break;

        case SegmentKind::SyncCopy: {
            if (auto action = tracker.begin_sync_copy()) {
                ShimStep step;
                step.actions.push_back(*action);
                on_actions(step, cpu);
            }
            cpu += seg.duration_us;
            if (auto action = tracker.end_sync_copy()) {
                ShimStep step;
                step.actions.push_back(*action);
                on_actions(step, cpu);
            }
            break;
        }

        case SegmentKind::AsyncCopy:
        case SegmentKind::KernelLaunch: {
            const ShimStep step = tracker.on_api_event(*segment_api_event(seg));
            on_actions(step, cpu);
            const time_us start = std::max(cpu, gpu_free);
            gpu_free = start + seg.duration_us;
            const int stream = seg.stream.value_or(0);
            stream_done[stream] = gpu_free;
            break;
        }

        case SegmentKind::DeviceSync:
        case SegmentKind::ThreadSync: {
            cpu = std::max(cpu, gpu_free);
            const ShimStep step = tracker.on_api_event(*segment_api_event(seg));
            on_actions(step, cpu);
            break;
        }

        case SegmentKind::StreamSync: {
            const int stream = seg.stream.value_or(0);
            if (auto it = stream_done.find(stream); it != stream_done.end()) {
                cpu = std::max(cpu, it->second);
            }
            const ShimStep step = tracker.on_api_event(*segment_api_event(seg));
            on_actions(step, cpu);
            break;
        }

        case SegmentKind::ConfigureCall: {
            const ShimStep step = tracker.on_api_event(*segment_api_event(seg));
            on_actions(step, cpu);
            break;
        }
        }
    }

    // A program that never synchronizes keeps the lock until teardown, when
    // its pending GPU work implicitly drains.
    if (tracker.lock_held()) {
        cpu = std::max(cpu, gpu_free);
        on_actions(tracker.force_drain(), cpu);
    }
    return intervals;
}

} // namespace bwsim
