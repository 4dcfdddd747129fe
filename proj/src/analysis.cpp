#include "bwsim/analysis.hpp"

#include <algorithm>

#include <json.hpp>

#include "bwsim/gpu_shim.hpp"

namespace bwsim {

namespace {

// Higher priority first; ties resolve by id so the order is total.
bool ranks_higher(const RtTaskSpec& a, const RtTaskSpec& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.id < b.id;
}

time_us longest_lock_interval(const RtTaskSpec& task) {
    time_us longest = 0;
    for (const LockInterval& interval : lock_intervals(task.segments)) {
        longest = std::max(longest, interval.length_us());
    }
    return longest;
}

} // namespace

time_us blocking_term(std::span<const RtTaskSpec> taskset, std::size_t index) {
    const RtTaskSpec& task = taskset[index];
    time_us blocking = 0;
    for (std::size_t j = 0; j < taskset.size(); ++j) {
        if (j == index || ranks_higher(taskset[j], task)) continue;
        blocking = std::max(blocking, longest_lock_interval(taskset[j]));
    }
    return blocking;
}

AnalysisResult response_time(std::span<const RtTaskSpec> taskset) {
    std::vector<std::size_t> order(taskset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks_higher(taskset[a], taskset[b]);
    });

    AnalysisResult result;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const RtTaskSpec& task = taskset[order[rank]];
        TaskAnalysis analysis;
        analysis.id = task.id;
        analysis.priority = task.priority;
        analysis.wcet_us = derived_wcet(task).total_us;
        analysis.blocking_us = blocking_term(taskset, order[rank]);

        time_us response = analysis.wcet_us + analysis.blocking_us;
        while (response <= task.period_us) {
            time_us next = analysis.wcet_us + analysis.blocking_us;
            for (std::size_t h = 0; h < rank; ++h) {
                const RtTaskSpec& hp = taskset[order[h]];
                next += ceil_div(response, hp.period_us) * derived_wcet(hp).total_us;
            }
            if (next == response) {
                analysis.response_us = response;
                analysis.schedulable = true;
                break;
            }
            response = next;
        }
        // Iteration stops as soon as the response exceeds the period: the
        // verdict is already unschedulable under implicit deadlines.
        if (!analysis.response_us.has_value()) result.schedulable = false;
        result.tasks.push_back(std::move(analysis));
    }
    return result;
}

std::string analysis_to_json(const AnalysisResult& result) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["schedulable"] = result.schedulable;
    nlohmann::json tasks = nlohmann::json::array();
    for (const TaskAnalysis& task : result.tasks) {
        nlohmann::json entry;
        entry["id"] = task.id;
        entry["priority"] = task.priority;
        entry["wcet_us"] = task.wcet_us;
        entry["blocking_us"] = task.blocking_us;
        entry["response_us"] = task.response_us.has_value()
                                   ? nlohmann::json(*task.response_us)
                                   : nlohmann::json(nullptr);
        entry["schedulable"] = task.schedulable;
        tasks.push_back(entry);
    }
    doc["tasks"] = tasks;
    return doc.dump(2) + "\n";
}

} // namespace bwsim
