#ifndef BWSIM_ANALYSIS_HPP
#define BWSIM_ANALYSIS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bwsim/units.hpp"
#include "bwsim/workload.hpp"

namespace bwsim {

/// Fixed-priority response-time analysis with bandwidth-lock blocking.
///
/// R = E + B + sum over higher-priority j of ceil(R / P_j) * E_j, iterated
/// to the fixed point; a task is schedulable when R <= P (implicit
/// deadlines). B is the longest single lock-protected interval of any
/// lower-priority task, extracted through the stream-tracker semantics so
/// multi-stream chains that keep the lock held are charged as one interval.

struct TaskAnalysis {
    std::string id;
    int priority = 0;
    time_us wcet_us = 0;      // E
    time_us blocking_us = 0;  // B
    std::optional<time_us> response_us;  // nullopt: iteration exceeded the period
    bool schedulable = false;
};

struct AnalysisResult {
    std::vector<TaskAnalysis> tasks;  // highest priority first
    bool schedulable = true;
};

/// Longest lock-protected interval among tasks with lower priority than
/// tasks[index]; 0 when there is none. Priority ties resolve by id
/// (lexicographically smaller id ranks higher).
time_us blocking_term(std::span<const RtTaskSpec> taskset, std::size_t index);

AnalysisResult response_time(std::span<const RtTaskSpec> taskset);

std::string analysis_to_json(const AnalysisResult& result);

} // namespace bwsim

#endif // BWSIM_ANALYSIS_HPP
