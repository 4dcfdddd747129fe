#ifndef BWSIM_UNITS_HPP
#define BWSIM_UNITS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bwsim {

// All engine arithmetic is integer fixed-point so that traces are
// bit-identical across runs and platforms.
//
//   time_us    simulation timestamps and durations, microseconds
//   vrun_ps    virtual runtime, picoseconds (1 us = 1'000'000 ps)
//   byte_mil   bandwidth ledger, 1/1000 byte; rate(bytes/ms) * dt(us) is exact
//   ppm        dimensionless factors (rho, alpha) scaled by 1e6
//   weight_mil task weights scaled by 1e3

using time_us = std::int64_t;
using vrun_ps = std::int64_t;
using byte_mil = std::int64_t;

inline constexpr std::int64_t kUsPerMs = 1'000;
inline constexpr std::int64_t kPsPerUs = 1'000'000;
inline constexpr std::int64_t kMilPerByte = 1'000;
inline constexpr std::int64_t kPpmScale = 1'000'000;
inline constexpr std::int64_t kWeightScale = 1'000;

// Large enough to never exhaust in a period, small enough to avoid overflow
// in the byte_mil ledger.
inline constexpr std::int64_t kUnlimitedBudgetBytes = INT64_C(1) << 50;

time_us ms_to_us(double ms);
double us_to_ms(time_us us);
double ps_to_ms(vrun_ps ps);
std::int64_t to_ppm(double factor);
double from_ppm(std::int64_t ppm);
std::int64_t to_weight_mil(double weight);
double from_weight_mil(std::int64_t mil);

inline constexpr std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
    return (num + den - 1) / den;
}

// Internal consistency failure (broken engine invariant, event-storm guard).
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

#define BWSIM_ASSERT(cond, msg)                                   \
    do {                                                          \
        if (!(cond)) throw ::bwsim::SimError(std::string(msg));   \
    } while (0)

} // namespace bwsim

#endif // BWSIM_UNITS_HPP
