#include "bwsim/contention.hpp"

#include <algorithm>
#include <numeric>

namespace bwsim {

namespace {

using int128 = __int128;

std::int64_t mul_div_ceil(std::int64_t a, std::int64_t b, std::int64_t den) {
    const int128 num = static_cast<int128>(a) * b;
    return static_cast<std::int64_t>((num + den - 1) / den);
}

} // namespace

ExhaustSplit time_to_exhaust(std::int64_t rate_bytes_per_ms, std::int64_t budget_bytes,
                             time_us period_us) {
    ExhaustSplit split{period_us, 0};
    if (rate_bytes_per_ms <= 0) return split;
    // budget (byte_mil) / rate (bytes/ms) = microseconds, exact at the
    // boundary rate * T == budget.
    const time_us t = mul_div_ceil(budget_bytes, kMilPerByte, rate_bytes_per_ms);
    if (t >= period_us) return split;
    split.run_us = t;
    split.throttled_us = period_us - t;
    return split;
}

SlowdownFactor gpu_slowdown_factor(std::int64_t aggregate_bytes_per_ms,
                                   const ContentionParams& params) {
    if (params.mode == ContentionParams::Mode::None || aggregate_bytes_per_ms <= 0 ||
        params.alpha_ppm == 0) {
        return {1, 1};
    }
    // 1 + alpha * u / bw_ref == (bw_ref * 1e6 + alpha_ppm * u) / (bw_ref * 1e6)
    const int128 den128 = static_cast<int128>(params.bw_ref_bytes_per_ms) * kPpmScale;
    const int128 num128 = den128 + static_cast<int128>(params.alpha_ppm) * aggregate_bytes_per_ms;
    std::int64_t num = static_cast<std::int64_t>(num128);
    std::int64_t den = static_cast<std::int64_t>(den128);
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

std::int64_t consumed_bytes(std::int64_t rate_bytes_per_ms, time_us interval_us,
                            std::int64_t remaining_bytes) {
    const byte_mil used = consumed_mil(rate_bytes_per_ms, interval_us,
                                       remaining_bytes * kMilPerByte);
    return used / kMilPerByte;
}

byte_mil consumed_mil(std::int64_t rate_bytes_per_ms, time_us interval_us,
                      byte_mil remaining_mil) {
    if (rate_bytes_per_ms <= 0 || interval_us <= 0) return 0;
    // rate (bytes/ms) * interval (us) is exactly byte_mil.
    const int128 used = static_cast<int128>(rate_bytes_per_ms) * interval_us;
    if (used >= static_cast<int128>(remaining_mil)) return remaining_mil;
    return static_cast<byte_mil>(used);
}

time_us exhaust_delay_us(std::int64_t rate_bytes_per_ms, byte_mil remaining_mil) {
    if (rate_bytes_per_ms <= 0) return INT64_MAX / 4;
    if (remaining_mil <= 0) return 0;
    return mul_div_ceil(remaining_mil, 1, rate_bytes_per_ms);
}

vrun_ps slowed_progress_ps(time_us wall_us, const SlowdownFactor& factor) {
    if (wall_us <= 0) return 0;
    if (factor.is_unit()) return wall_us * kPsPerUs;
    const int128 num = static_cast<int128>(wall_us) * kPsPerUs * factor.den;
    return static_cast<vrun_ps>(num / factor.num);
}

time_us slowed_completion_us(vrun_ps remaining_ps, const SlowdownFactor& factor) {
    if (remaining_ps <= 0) return 0;
    if (factor.is_unit()) return ceil_div(remaining_ps, kPsPerUs);
    const int128 num = static_cast<int128>(remaining_ps) * factor.num;
    const int128 den = static_cast<int128>(factor.den) * kPsPerUs;
    return static_cast<time_us>((num + den - 1) / den);
}

} // namespace bwsim
