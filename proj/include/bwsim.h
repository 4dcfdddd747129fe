/*
 * bwsim C API: deterministic simulation and schedulability analysis of
 * memory-bandwidth-regulated scheduling on integrated CPU-GPU systems.
 *
 * All objects are opaque handles. Every function that can fail returns a
 * bwsim_status; on failure an optional error string is stored in *err_msg
 * (free with bwsim_string_free). Handles are not thread-safe, but distinct
 * handles may be used from distinct threads freely.
 */
#ifndef BWSIM_H
#define BWSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bwsim_scenario bwsim_scenario;
typedef struct bwsim_result bwsim_result;

typedef enum bwsim_status {
    BWSIM_OK = 0,
    BWSIM_ERR_BADARG = 1,       /* null handle / malformed argument */
    BWSIM_ERR_PARSE = 2,        /* scenario document is not well-formed */
    BWSIM_ERR_INVALID = 3,      /* scenario violates an invariant */
    BWSIM_ERR_RUNTIME = 4,      /* simulation guard tripped */
    BWSIM_ERR_UNKNOWN_NAME = 5, /* no such built-in scenario */
} bwsim_status;

const char* bwsim_version(void);
const char* bwsim_status_name(bwsim_status status);

/* ---- scenarios ---------------------------------------------------- */

bwsim_status bwsim_scenario_from_json(const char* json, size_t len,
                                      bwsim_scenario** out, char** err_msg);

/* Comma-separated list of built-in scenario names. Static storage. */
const char* bwsim_builtin_names(void);

bwsim_status bwsim_scenario_builtin(const char* name, bwsim_scenario** out,
                                    char** err_msg);

/* Deterministic randomized scenario (mixed-intensity best-effort workload). */
bwsim_status bwsim_scenario_random(uint64_t seed, bwsim_scenario** out,
                                   char** err_msg);

/* Renders the scenario document; parse of the result reproduces the handle. */
bwsim_status bwsim_scenario_to_json(const bwsim_scenario* scenario, char** json_out);

/* Overrides. Each re-validates the scenario and fails with
 * BWSIM_ERR_INVALID, leaving the handle unchanged, if the result would
 * violate an invariant. */
bwsim_status bwsim_scenario_set_scheduler(bwsim_scenario* scenario, const char* mode,
                                          char** err_msg); /* "cfs" | "tfs" */
bwsim_status bwsim_scenario_set_rho(bwsim_scenario* scenario, double rho, char** err_msg);
bwsim_status bwsim_scenario_set_budget_bytes(bwsim_scenario* scenario, int64_t bytes,
                                             char** err_msg);
bwsim_status bwsim_scenario_set_duration_ms(bwsim_scenario* scenario, double ms,
                                            char** err_msg);
bwsim_status bwsim_scenario_set_alpha(bwsim_scenario* scenario, double alpha,
                                      char** err_msg);

void bwsim_scenario_free(bwsim_scenario* scenario);

/* ---- simulation ---------------------------------------------------- */

bwsim_status bwsim_run(const bwsim_scenario* scenario, bwsim_result** out, char** err_msg);

/* Borrowed pointers, valid until bwsim_result_free. */
const char* bwsim_result_trace_csv(const bwsim_result* result);
const char* bwsim_result_metrics_json(const bwsim_result* result);

void bwsim_result_free(bwsim_result* result);

/* ---- analysis ------------------------------------------------------ */

/* Fixed-priority response-time verdict for the scenario's RT taskset
 * (best-effort tasks are ignored). JSON document in *verdict_json. */
bwsim_status bwsim_analyze(const bwsim_scenario* scenario, char** verdict_json,
                           char** err_msg);

/* ---- memory -------------------------------------------------------- */

void bwsim_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BWSIM_H */
