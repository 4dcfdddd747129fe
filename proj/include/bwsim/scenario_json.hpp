#ifndef BWSIM_SCENARIO_JSON_HPP
#define BWSIM_SCENARIO_JSON_HPP

#include <string>

#include "bwsim/workload.hpp"

namespace bwsim {

// Scenario document, JSON. Top-level keys: config, rt_tasks, be_tasks,
// sim_duration_ms, scheduler ("cfs"|"tfs"). Times are milliseconds as
// decimal numbers, budgets are bytes as integers. See README for the full
// schema.

/// Parses and validates; throws ScenarioError (Syntax / Invariant / DuplicateId).
Scenario parse_scenario(const std::string& text);

/// Renders a scenario such that parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& scenario);

} // namespace bwsim

#endif // BWSIM_SCENARIO_JSON_HPP
