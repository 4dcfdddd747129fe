#ifndef BWSIM_CONTENTION_HPP
#define BWSIM_CONTENTION_HPP

#include <cstdint>

#include "bwsim/units.hpp"

namespace bwsim {

/// Pluggable model mapping aggregate best-effort CPU bandwidth to a GPU
/// slowdown factor. Linear: factor = 1 + alpha * (u / bw_ref). The defaults
/// carry the calibration fit (three 300 KB/ms co-runners slowing a kernel
/// 3.3x); scheduling-only studies switch the mode to None.
struct ContentionParams {
    enum class Mode { None, Linear };

    Mode mode = Mode::Linear;
    std::int64_t alpha_ppm = 2'300'000;          // 2.3
    std::int64_t bw_ref_bytes_per_ms = 900'000;  // the calibration co-runner aggregate

    bool operator==(const ContentionParams&) const = default;
};

/// Slowdown as an exact rational num/den >= 1. GPU and copy segments
/// progress den/num nominal time per unit of wall time.
struct SlowdownFactor {
    std::int64_t num = 1;
    std::int64_t den = 1;

    bool is_unit() const { return num == den; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// How a regulation period splits for a task with constant demand:
/// run_us executing, throttled_us forced idle. run = min(T, Q/r) rounded
/// up to the next microsecond; the boundary case r*T == Q never throttles.
struct ExhaustSplit {
    time_us run_us = 0;
    time_us throttled_us = 0;
};

ExhaustSplit time_to_exhaust(std::int64_t rate_bytes_per_ms, std::int64_t budget_bytes,
                             time_us period_us);

SlowdownFactor gpu_slowdown_factor(std::int64_t aggregate_bytes_per_ms,
                                   const ContentionParams& params);

/// Bytes consumed over an interval, clamped to the remaining budget.
std::int64_t consumed_bytes(std::int64_t rate_bytes_per_ms, time_us interval_us,
                            std::int64_t remaining_bytes);

// byte_mil ledger helpers used by the regulator.
byte_mil consumed_mil(std::int64_t rate_bytes_per_ms, time_us interval_us,
                      byte_mil remaining_mil);
// Time until a ledger of remaining_mil drains at the given rate; 0 rate never
// drains (returns a sentinel beyond any period).
time_us exhaust_delay_us(std::int64_t rate_bytes_per_ms, byte_mil remaining_mil);

// Nominal progress of a memory-bound segment over wall_us of wall time.
vrun_ps slowed_progress_ps(time_us wall_us, const SlowdownFactor& factor);
// Wall time needed to finish remaining_ps of nominal work (>= 1 us if work remains).
time_us slowed_completion_us(vrun_ps remaining_ps, const SlowdownFactor& factor);

} // namespace bwsim

#endif // BWSIM_CONTENTION_HPP
