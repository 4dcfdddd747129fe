#ifndef BWSIM_PAPER_SCENARIOS_HPP
#define BWSIM_PAPER_SCENARIOS_HPP

#include <string>
#include <vector>

#include "bwsim/workload.hpp"

namespace bwsim {

// Built-in scenarios.
//
//   fig4-cfs       two-core system, one RT task holding the bandwidth lock
//                  across the whole window, a memory-intensive and a
//                  CPU-intensive best-effort task sharing the other core
//                  under plain fair scheduling; the memory-intensive task
//                  exhausts the budget a third of the way into each period.
//   fig4-ideal     same workload with the memory-intensive task's initial
//                  vruntime raised so the CPU-intensive task runs the whole
//                  window; a constructed zero-throttle schedule, not a
//                  scheduler mode.
//   fig4-tfs3      same workload under throttle-fair scheduling, rho = 3.
//   tfs-synthetic  the same intense/mild pair stretched to 1000 regulation
//                  periods for period-share measurements.

std::vector<std::string> paper_scenario_names();

/// Throws ScenarioError (Invariant, field "name") for unknown names.
Scenario make_paper_scenario(const std::string& name);

/// Calibration workload for the linear contention model: three co-runners
/// at 300 KB/ms against one 10 ms kernel, unregulated, alpha fitted so the
/// observed kernel slowdown is 3.3x.
Scenario builtin_calibration_scenario();

} // namespace bwsim

#endif // BWSIM_PAPER_SCENARIOS_HPP
