#include "bwsim/units.hpp"

#include <cmath>

namespace bwsim {

time_us ms_to_us(double ms) {
    return static_cast<time_us>(std::llround(ms * 1000.0));
}

double us_to_ms(time_us us) {
    return static_cast<double>(us) / 1000.0;
}

double ps_to_ms(vrun_ps ps) {
    return static_cast<double>(ps) / 1e9;
}

std::int64_t to_ppm(double factor) {
    return std::llround(factor * static_cast<double>(kPpmScale));
}

double from_ppm(std::int64_t ppm) {
    return static_cast<double>(ppm) / static_cast<double>(kPpmScale);
}

std::int64_t to_weight_mil(double weight) {
    return std::llround(weight * static_cast<double>(kWeightScale));
}

double from_weight_mil(std::int64_t mil) {
    return static_cast<double>(mil) / static_cast<double>(kWeightScale);
}

} // namespace bwsim
