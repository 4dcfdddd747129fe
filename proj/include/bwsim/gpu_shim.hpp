#ifndef BWSIM_GPU_SHIM_HPP
#define BWSIM_GPU_SHIM_HPP

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "bwsim/units.hpp"
#include "bwsim/workload.hpp"

namespace bwsim {

/// GPU runtime calls visible to the interception layer, one per wrapped API.
enum class ApiKind {
    ConfigureCall,
    Memcpy,
    MemcpyAsync,
    Launch,
    DeviceSync,
    ThreadSync,
    StreamSync,
};

const char* api_kind_name(ApiKind kind);

struct ApiEvent {
    ApiKind kind = ApiKind::Launch;
    std::optional<int> stream;
};

enum class LockAction { Acquire, Release };

/// Outcome of feeding one API event through the tracker.
struct ShimStep {
    std::vector<LockAction> actions;       // in call order
    std::optional<int> effective_stream;   // resolved stream for Launch
    std::vector<int> activated;            // streams that became active
    std::vector<int> retired;              // streams that stopped being active
    bool inactive_stream_warning = false;  // StreamSync on a non-active stream
};

/// Tracks active streams for one task and decides when the bandwidth lock
/// must be acquired or released. A stream is active from the moment work is
/// launched into it until it is synchronized with, explicitly or implicitly;
/// the lock is held exactly while any stream is active or a synchronous copy
/// is in flight.
class StreamTracker {
public:
    ShimStep on_api_event(const ApiEvent& event);

    // Split form of Memcpy for callers that need the bracket instants.
    std::optional<LockAction> begin_sync_copy();
    std::optional<LockAction> end_sync_copy();

    bool lock_held() const { return lock_held_; }
    bool in_sync_copy() const { return in_sync_copy_; }
    const std::set<int>& active_streams() const { return active_; }
    std::optional<int> pending_launch_stream() const { return pending_launch_stream_; }

    /// Drops every active stream, releasing the lock if held. Models the
    /// implicit synchronization at task teardown; returns the streams retired.
    ShimStep force_drain();

private:
    void acquire_if_needed(ShimStep& step);
    void release(ShimStep& step);
    void activate(int stream, ShimStep& step);

    std::set<int> active_;
    bool lock_held_ = false;
    bool in_sync_copy_ = false;
    std::optional<int> pending_launch_stream_;
};

/// Maps a segment list to an API event (nullopt for CpuCompute).
std::optional<ApiEvent> segment_api_event(const Segment& segment);

/// Nominal [start, end) windows during which a task holds the bandwidth
/// lock, obtained by executing the segment list in isolation against a
/// FIFO GPU: CPU time advances through compute and synchronous copies,
/// queued kernels and async copies complete in submission order, and sync
/// points block until the relevant work drains. Used by the response-time
/// analysis to bound lock-protected intervals.
struct LockInterval {
    time_us start_us = 0;
    time_us end_us = 0;

    time_us length_us() const { return end_us - start_us; }
};

std::vector<LockInterval> lock_intervals(std::span<const Segment> segments);

} // namespace bwsim

#endif // BWSIM_GPU_SHIM_HPP
