#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "bwsim.h"

namespace {

struct Scenario {
    bwsim_scenario* ptr = nullptr;
    ~Scenario() { bwsim_scenario_free(ptr); }
};

struct Result {
    bwsim_result* ptr = nullptr;
    ~Result() { bwsim_result_free(ptr); }
};

std::string take(char* s) {
    std::string out = s != nullptr ? s : "";
    bwsim_string_free(s);
    return out;
}

} // namespace

TEST_CASE("parse, run, and read results through the C boundary") {
    const std::string text = R"({
      "rt_tasks": [{"id": "t", "period_ms": 10, "priority": 5,
                    "segments": [{"kind": "compute", "ms": 2}]}],
      "sim_duration_ms": 20,
      "scheduler": "cfs"
    })";
    Scenario scenario;
    char* err = nullptr;
    REQUIRE(bwsim_scenario_from_json(text.c_str(), text.size(), &scenario.ptr, &err) ==
            BWSIM_OK);

    Result result;
    REQUIRE(bwsim_run(scenario.ptr, &result.ptr, &err) == BWSIM_OK);
    const std::string trace = bwsim_result_trace_csv(result.ptr);
    const std::string metrics = bwsim_result_metrics_json(result.ptr);
    CHECK(trace.find("time_us,core,event,task,detail") != std::string::npos);
    CHECK(trace.find("job_complete") != std::string::npos);
    CHECK(metrics.find("\"format_version\"") != std::string::npos);
    CHECK(metrics.find("\"jobs_completed\": 2") != std::string::npos);
}

TEST_CASE("error paths carry distinct statuses and messages") {
    bwsim_scenario* out = nullptr;
    char* err = nullptr;

    SUBCASE("malformed JSON") {
        const char* text = "{not json";
        CHECK(bwsim_scenario_from_json(text, std::strlen(text), &out, &err) ==
              BWSIM_ERR_PARSE);
        CHECK(!take(err).empty());
    }
    SUBCASE("invariant violation") {
        const char* text = R"({"sim_duration_ms": 1,
                               "be_tasks": [{"id": "b", "core": 0}]})";
        CHECK(bwsim_scenario_from_json(text, std::strlen(text), &out, &err) ==
              BWSIM_ERR_INVALID);
        CHECK(take(err).find("b.core") != std::string::npos);
    }
    SUBCASE("unknown built-in name") {
        CHECK(bwsim_scenario_builtin("nope", &out, &err) == BWSIM_ERR_UNKNOWN_NAME);
        CHECK(take(err).find("fig4-cfs") != std::string::npos);
    }
    SUBCASE("null arguments") {
        CHECK(bwsim_scenario_from_json(nullptr, 0, &out, nullptr) == BWSIM_ERR_BADARG);
        CHECK(bwsim_run(nullptr, nullptr, nullptr) == BWSIM_ERR_BADARG);
    }
}

TEST_CASE("builtin scenarios round-trip through the document form") {
    Scenario builtin;
    char* err = nullptr;
    REQUIRE(bwsim_scenario_builtin("fig4-cfs", &builtin.ptr, &err) == BWSIM_OK);
    char* json = nullptr;
    REQUIRE(bwsim_scenario_to_json(builtin.ptr, &json) == BWSIM_OK);
    const std::string text = take(json);
    CHECK(text.find("tau_mem") != std::string::npos);

    Scenario reparsed;
    REQUIRE(bwsim_scenario_from_json(text.c_str(), text.size(), &reparsed.ptr, &err) ==
            BWSIM_OK);
    char* again = nullptr;
    REQUIRE(bwsim_scenario_to_json(reparsed.ptr, &again) == BWSIM_OK);
    CHECK(take(again) == text);

    CHECK(std::string(bwsim_builtin_names()).find("tfs-synthetic") != std::string::npos);
}

TEST_CASE("overrides compose like editing the document") {
    char* err = nullptr;
    Scenario overridden;
    REQUIRE(bwsim_scenario_builtin("fig4-cfs", &overridden.ptr, &err) == BWSIM_OK);
    REQUIRE(bwsim_scenario_set_scheduler(overridden.ptr, "tfs", &err) == BWSIM_OK);
    REQUIRE(bwsim_scenario_set_rho(overridden.ptr, 3.0, &err) == BWSIM_OK);

    Scenario reference;
    REQUIRE(bwsim_scenario_builtin("fig4-tfs3", &reference.ptr, &err) == BWSIM_OK);

    Result a;
    Result b;
    REQUIRE(bwsim_run(overridden.ptr, &a.ptr, &err) == BWSIM_OK);
    REQUIRE(bwsim_run(reference.ptr, &b.ptr, &err) == BWSIM_OK);
    CHECK(std::string(bwsim_result_metrics_json(a.ptr)) ==
          bwsim_result_metrics_json(b.ptr));
    CHECK(std::string(bwsim_result_trace_csv(a.ptr)) == bwsim_result_trace_csv(b.ptr));
}

TEST_CASE("invalid overrides leave the scenario untouched") {
    char* err = nullptr;
    Scenario scenario;
    REQUIRE(bwsim_scenario_builtin("fig4-cfs", &scenario.ptr, &err) == BWSIM_OK);
    char* before = nullptr;
    REQUIRE(bwsim_scenario_to_json(scenario.ptr, &before) == BWSIM_OK);
    const std::string snapshot = take(before);

    CHECK(bwsim_scenario_set_rho(scenario.ptr, -1.0, &err) == BWSIM_ERR_INVALID);
    CHECK(take(err).find("tfs_rho") != std::string::npos);
    CHECK(bwsim_scenario_set_budget_bytes(scenario.ptr, 0, &err) == BWSIM_ERR_INVALID);
    take(err);
    CHECK(bwsim_scenario_set_scheduler(scenario.ptr, "other", &err) == BWSIM_ERR_INVALID);
    take(err);

    char* after = nullptr;
    REQUIRE(bwsim_scenario_to_json(scenario.ptr, &after) == BWSIM_OK);
    CHECK(take(after) == snapshot);
}

TEST_CASE("analysis verdicts flow through the C boundary") {
    const std::string text = R"({
      "rt_tasks": [
        {"id": "hi", "period_ms": 15, "priority": 9,
         "segments": [{"kind": "compute", "ms": 4}]},
        {"id": "lo", "period_ms": 30, "priority": 1,
         "segments": [{"kind": "compute", "ms": 3},
                       {"kind": "kernel", "ms": 3, "stream": 0},
                       {"kind": "device_sync"}]}
      ],
      "sim_duration_ms": 1,
      "scheduler": "cfs"
    })";
    Scenario scenario;
    char* err = nullptr;
    REQUIRE(bwsim_scenario_from_json(text.c_str(), text.size(), &scenario.ptr, &err) ==
            BWSIM_OK);
    char* verdict = nullptr;
    REQUIRE(bwsim_analyze(scenario.ptr, &verdict, &err) == BWSIM_OK);
    const std::string json = take(verdict);
    CHECK(json.find("\"schedulable\": true") != std::string::npos);
    CHECK(json.find("\"response_us\": 7000") != std::string::npos);
    CHECK(json.find("\"response_us\": 10000") != std::string::npos);
}

TEST_CASE("random scenarios are deterministic per seed") {
    char* err = nullptr;
    Scenario a;
    Scenario b;
    REQUIRE(bwsim_scenario_random(42, &a.ptr, &err) == BWSIM_OK);
    REQUIRE(bwsim_scenario_random(42, &b.ptr, &err) == BWSIM_OK);
    char* ja = nullptr;
    char* jb = nullptr;
    REQUIRE(bwsim_scenario_to_json(a.ptr, &ja) == BWSIM_OK);
    REQUIRE(bwsim_scenario_to_json(b.ptr, &jb) == BWSIM_OK);
    CHECK(take(ja) == take(jb));
    CHECK(std::string(bwsim_version()) == "1.0.0");
    CHECK(std::string(bwsim_status_name(BWSIM_ERR_PARSE)) == "parse_error");
}
