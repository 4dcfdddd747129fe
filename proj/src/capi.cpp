#include "bwsim.h"

#include <cstring>
#include <new>
#include <string>

#include "bwsim/analysis.hpp"
#include "bwsim/engine.hpp"
#include "bwsim/paper_scenarios.hpp"
#include "bwsim/scenario_json.hpp"
#include "bwsim/taskgen.hpp"
#include "bwsim/units.hpp"
#include "bwsim/workload.hpp"

struct bwsim_scenario {
    bwsim::Scenario scenario;
};

struct bwsim_result {
    std::string trace_csv;
    std::string metrics_json;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out == nullptr) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_error(char** err_msg, const std::string& message) {
    if (err_msg != nullptr) *err_msg = dup_string(message);
}

bwsim_status status_of(const bwsim::ScenarioError& e) {
    return e.kind() == bwsim::ScenarioError::Kind::Syntax ? BWSIM_ERR_PARSE
                                                          : BWSIM_ERR_INVALID;
}

// Applies an edit to a copy of the scenario; commits only if it validates.
template <typename Edit>
bwsim_status apply_override(bwsim_scenario* scenario, char** err_msg, Edit edit) {
    if (scenario == nullptr) return BWSIM_ERR_BADARG;
    bwsim::Scenario copy = scenario->scenario;
    edit(copy);
    try {
        bwsim::validate_scenario(copy);
    } catch (const bwsim::ScenarioError& e) {
        set_error(err_msg, e.what());
        return status_of(e);
    }
    scenario->scenario = std::move(copy);
    return BWSIM_OK;
}

} // namespace

extern "C" {

const char* bwsim_version(void) { return "1.0.0"; }

const char* bwsim_status_name(bwsim_status status) {
    switch (status) {
    case BWSIM_OK: return "ok";
    case BWSIM_ERR_BADARG: return "bad_argument";
    case BWSIM_ERR_PARSE: return "parse_error";
    case BWSIM_ERR_INVALID: return "invalid_scenario";
    case BWSIM_ERR_RUNTIME: return "runtime_error";
    case BWSIM_ERR_UNKNOWN_NAME: return "unknown_name";
    }
    return "?";
}

bwsim_status bwsim_scenario_from_json(const char* json, size_t len, bwsim_scenario** out,
                                      char** err_msg) {
    if (json == nullptr || out == nullptr) return BWSIM_ERR_BADARG;
    try {
        bwsim::Scenario scenario = bwsim::parse_scenario(std::string(json, len));
        *out = new bwsim_scenario{std::move(scenario)};
        return BWSIM_OK;
    } catch (const bwsim::ScenarioError& e) {
        set_error(err_msg, e.what());
        return status_of(e);
    }
}

const char* bwsim_builtin_names(void) {
    static const std::string names = [] {
        std::string joined;
        for (const std::string& name : bwsim::paper_scenario_names()) {
            if (!joined.empty()) joined += ",";
            joined += name;
        }
        return joined;
    }();
    return names.c_str();
}

bwsim_status bwsim_scenario_builtin(const char* name, bwsim_scenario** out, char** err_msg) {
    if (name == nullptr || out == nullptr) return BWSIM_ERR_BADARG;
    try {
        *out = new bwsim_scenario{bwsim::make_paper_scenario(name)};
        return BWSIM_OK;
    } catch (const bwsim::ScenarioError& e) {
        set_error(err_msg, e.what());
        return BWSIM_ERR_UNKNOWN_NAME;
    }
}

bwsim_status bwsim_scenario_random(uint64_t seed, bwsim_scenario** out, char** err_msg) {
    if (out == nullptr) return BWSIM_ERR_BADARG;
    try {
        *out = new bwsim_scenario{bwsim::random_be_scenario(seed)};
        return BWSIM_OK;
    } catch (const std::exception& e) {
        set_error(err_msg, e.what());
        return BWSIM_ERR_RUNTIME;
    }
}

bwsim_status bwsim_scenario_to_json(const bwsim_scenario* scenario, char** json_out) {
    if (scenario == nullptr || json_out == nullptr) return BWSIM_ERR_BADARG;
    *json_out = dup_string(bwsim::render_scenario(scenario->scenario));
    return *json_out != nullptr ? BWSIM_OK : BWSIM_ERR_RUNTIME;
}

bwsim_status bwsim_scenario_set_scheduler(bwsim_scenario* scenario, const char* mode,
                                          char** err_msg) {
    if (mode == nullptr) return BWSIM_ERR_BADARG;
    const std::string name(mode);
    if (name != "cfs" && name != "tfs") {
        set_error(err_msg, "scheduler must be \"cfs\" or \"tfs\"");
        return BWSIM_ERR_INVALID;
    }
    return apply_override(scenario, err_msg, [&](bwsim::Scenario& s) {
        s.scheduler = name == "cfs" ? bwsim::SchedulerMode::Cfs : bwsim::SchedulerMode::Tfs;
    });
}

bwsim_status bwsim_scenario_set_rho(bwsim_scenario* scenario, double rho, char** err_msg) {
    return apply_override(scenario, err_msg, [&](bwsim::Scenario& s) {
        s.config.tfs_rho_ppm = bwsim::to_ppm(rho);
    });
}

bwsim_status bwsim_scenario_set_budget_bytes(bwsim_scenario* scenario, int64_t bytes,
                                             char** err_msg) {
    return apply_override(scenario, err_msg, [&](bwsim::Scenario& s) {
        s.config.throttle_budget_bytes = bytes;
    });
}

bwsim_status bwsim_scenario_set_duration_ms(bwsim_scenario* scenario, double ms,
                                            char** err_msg) {
    return apply_override(scenario, err_msg, [&](bwsim::Scenario& s) {
        s.sim_duration_us = bwsim::ms_to_us(ms);
    });
}

bwsim_status bwsim_scenario_set_alpha(bwsim_scenario* scenario, double alpha, char** err_msg) {
    return apply_override(scenario, err_msg, [&](bwsim::Scenario& s) {
        s.config.slowdown.alpha_ppm = bwsim::to_ppm(alpha);
    });
}

void bwsim_scenario_free(bwsim_scenario* scenario) { delete scenario; }

bwsim_status bwsim_run(const bwsim_scenario* scenario, bwsim_result** out, char** err_msg) {
    if (scenario == nullptr || out == nullptr) return BWSIM_ERR_BADARG;
    try {
        bwsim::SimResult result = bwsim::run(scenario->scenario);
        auto* handle = new bwsim_result;
        handle->trace_csv = bwsim::trace_to_csv(result.trace);
        handle->metrics_json = bwsim::metrics_to_json(result.metrics);
        *out = handle;
        return BWSIM_OK;
    } catch (const bwsim::ScenarioError& e) {
        set_error(err_msg, e.what());
        return status_of(e);
    } catch (const bwsim::SimError& e) {
        set_error(err_msg, e.what());
        return BWSIM_ERR_RUNTIME;
    }
}

const char* bwsim_result_trace_csv(const bwsim_result* result) {
    return result != nullptr ? result->trace_csv.c_str() : nullptr;
}

const char* bwsim_result_metrics_json(const bwsim_result* result) {
    return result != nullptr ? result->metrics_json.c_str() : nullptr;
}

void bwsim_result_free(bwsim_result* result) { delete result; }

bwsim_status bwsim_analyze(const bwsim_scenario* scenario, char** verdict_json,
                           char** err_msg) {
    if (scenario == nullptr || verdict_json == nullptr) return BWSIM_ERR_BADARG;
    try {
        const bwsim::AnalysisResult result = bwsim::response_time(scenario->scenario.rt_tasks);
        *verdict_json = dup_string(bwsim::analysis_to_json(result));
        return *verdict_json != nullptr ? BWSIM_OK : BWSIM_ERR_RUNTIME;
    } catch (const std::exception& e) {
        set_error(err_msg, e.what());
        return BWSIM_ERR_RUNTIME;
    }
}

void bwsim_string_free(char* s) { delete[] s; }

} // extern "C"
