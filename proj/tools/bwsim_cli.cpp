// Command-line front end for the bwsim shared library. All simulation and
// analysis goes through the C API in bwsim.h; this tool only handles files,
// flags, and sweep orchestration.

#include <cinttypes>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bwsim.h"

namespace {

namespace fs = std::filesystem;

// Exit codes, also documented in the README:
//   0 success, 1 usage or I/O failure, 2 scenario parse error,
//   3 invariant violation, 4 simulation runtime guard, 6 unknown built-in.
int exit_code(bwsim_status status) {
    switch (status) {
    case BWSIM_OK: return 0;
    case BWSIM_ERR_PARSE: return 2;
    case BWSIM_ERR_INVALID: return 3;
    case BWSIM_ERR_RUNTIME: return 4;
    case BWSIM_ERR_UNKNOWN_NAME: return 6;
    default: return 1;
    }
}

struct ScenarioHandle {
    bwsim_scenario* ptr = nullptr;
    ~ScenarioHandle() { bwsim_scenario_free(ptr); }
};

struct ResultHandle {
    bwsim_result* ptr = nullptr;
    ~ResultHandle() { bwsim_result_free(ptr); }
};

std::string take_error(char* err) {
    if (err == nullptr) return "unknown error";
    std::string message(err);
    bwsim_string_free(err);
    return message;
}

int fail(bwsim_status status, const std::string& message) {
    std::cerr << "error (" << bwsim_status_name(status) << "): " << message << "\n";
    return exit_code(status);
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    out = buffer.str();
    return true;
}

bool write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << contents;
    return static_cast<bool>(out);
}

struct Overrides {
    std::optional<std::string> scheduler;
    std::optional<double> rho;
    std::optional<std::int64_t> budget_bytes;
    std::optional<double> duration_ms;
    std::optional<double> alpha;
};

void add_override_flags(CLI::App* cmd, Overrides& overrides) {
    cmd->add_option("--scheduler", overrides.scheduler, "Scheduler mode: cfs or tfs")
        ->check(CLI::IsMember({"cfs", "tfs"}));
    cmd->add_option("--rho", overrides.rho, "TFS punishment factor");
    cmd->add_option("--budget-bytes", overrides.budget_bytes,
                    "Per-core throttle budget per regulation period");
    cmd->add_option("--duration-ms", overrides.duration_ms, "Simulation duration");
    cmd->add_option("--alpha", overrides.alpha, "Linear contention coefficient");
}

bwsim_status apply_overrides(bwsim_scenario* scenario, const Overrides& overrides,
                             std::string& message) {
    char* err = nullptr;
    bwsim_status status = BWSIM_OK;
    if (overrides.scheduler && status == BWSIM_OK) {
        status = bwsim_scenario_set_scheduler(scenario, overrides.scheduler->c_str(), &err);
    }
    if (overrides.rho && status == BWSIM_OK) {
        status = bwsim_scenario_set_rho(scenario, *overrides.rho, &err);
    }
    if (overrides.budget_bytes && status == BWSIM_OK) {
        status = bwsim_scenario_set_budget_bytes(scenario, *overrides.budget_bytes, &err);
    }
    if (overrides.duration_ms && status == BWSIM_OK) {
        status = bwsim_scenario_set_duration_ms(scenario, *overrides.duration_ms, &err);
    }
    if (overrides.alpha && status == BWSIM_OK) {
        status = bwsim_scenario_set_alpha(scenario, *overrides.alpha, &err);
    }
    if (status != BWSIM_OK) message = take_error(err);
    return status;
}

bwsim_status load_scenario(const std::string& path, const Overrides& overrides,
                           ScenarioHandle& handle, std::string& message) {
    std::string text;
    if (!read_file(path, text)) {
        message = "cannot read " + path;
        return BWSIM_ERR_BADARG;
    }
    char* err = nullptr;
    const bwsim_status status =
        bwsim_scenario_from_json(text.c_str(), text.size(), &handle.ptr, &err);
    if (status != BWSIM_OK) {
        message = take_error(err);
        return status;
    }
    return apply_overrides(handle.ptr, overrides, message);
}

struct SweepPoint {
    std::string axis;
    std::string value;
    std::string scheduler;
    double rho = 0;
    std::string gpu_task;
    std::string gpu_slowdown = "";      // empty when the scenario has no GPU task
    std::int64_t system_throttle_us = 0;
};

// Pulls the sweep-relevant numbers out of a metrics document.
void summarize_metrics(const std::string& metrics_json, SweepPoint& point) {
    const nlohmann::json doc = nlohmann::json::parse(metrics_json);
    point.system_throttle_us = doc.at("system").at("throttle_time_us").get<std::int64_t>();
    for (const auto& [id, task] : doc.at("rt_tasks").items()) {
        const auto& nominal = task.at("nominal");
        const std::int64_t gpu_side = nominal.at("gpu_exec_us").get<std::int64_t>() +
                                      nominal.at("sync_copy_us").get<std::int64_t>();
        if (gpu_side > 0 && !task.at("slowdown").is_null()) {
            point.gpu_task = id;
            std::ostringstream fmt;
            fmt << task.at("slowdown").get<double>();
            point.gpu_slowdown = fmt.str();
            break;
        }
    }
}

int run_and_summarize(bwsim_scenario* scenario, SweepPoint& point, std::string& message) {
    ResultHandle result;
    char* err = nullptr;
    const bwsim_status status = bwsim_run(scenario, &result.ptr, &err);
    if (status != BWSIM_OK) {
        message = take_error(err);
        return exit_code(status);
    }
    summarize_metrics(bwsim_result_metrics_json(result.ptr), point);
    return 0;
}

int cmd_simulate(const std::string& path, const Overrides& overrides, const std::string& out_dir) {
    ScenarioHandle scenario;
    std::string message;
    bwsim_status status = load_scenario(path, overrides, scenario, message);
    if (status != BWSIM_OK) return fail(status, message);

    ResultHandle result;
    char* err = nullptr;
    status = bwsim_run(scenario.ptr, &result.ptr, &err);
    if (status != BWSIM_OK) return fail(status, take_error(err));

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path trace_path = fs::path(out_dir) / "trace.csv";
    const fs::path metrics_path = fs::path(out_dir) / "metrics.json";
    if (!write_file(trace_path, bwsim_result_trace_csv(result.ptr)) ||
        !write_file(metrics_path, bwsim_result_metrics_json(result.ptr))) {
        return fail(BWSIM_ERR_BADARG, "cannot write outputs under " + out_dir);
    }

    const nlohmann::json doc = nlohmann::json::parse(bwsim_result_metrics_json(result.ptr));
    std::cout << "simulated " << path << ": " << doc.at("system").at("trace_events").get<long>()
              << " trace events, system throttle "
              << doc.at("system").at("throttle_time_us").get<long>() << " us\n"
              << "wrote " << trace_path.string() << ", " << metrics_path.string() << "\n";
    return 0;
}

int cmd_analyze(const std::string& path, const std::string& out_dir) {
    ScenarioHandle scenario;
    std::string message;
    const bwsim_status status = load_scenario(path, Overrides{}, scenario, message);
    if (status != BWSIM_OK) return fail(status, message);

    char* verdict = nullptr;
    char* err = nullptr;
    const bwsim_status astatus = bwsim_analyze(scenario.ptr, &verdict, &err);
    if (astatus != BWSIM_OK) return fail(astatus, take_error(err));
    std::string text(verdict);
    bwsim_string_free(verdict);
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (!write_file(fs::path(out_dir) / "analysis.json", text)) {
            return fail(BWSIM_ERR_BADARG, "cannot write analysis under " + out_dir);
        }
    }
    std::cout << text;
    return 0;
}

int cmd_paper_scenario(const std::string& name, const std::string& out_dir) {
    ScenarioHandle scenario;
    char* err = nullptr;
    const bwsim_status status = bwsim_scenario_builtin(name.c_str(), &scenario.ptr, &err);
    if (status != BWSIM_OK) return fail(status, take_error(err));

    char* json = nullptr;
    if (bwsim_scenario_to_json(scenario.ptr, &json) != BWSIM_OK) {
        return fail(BWSIM_ERR_RUNTIME, "cannot render scenario");
    }
    std::string text(json);
    bwsim_string_free(json);
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        const fs::path path = fs::path(out_dir) / (name + ".json");
        if (!write_file(path, text)) {
            return fail(BWSIM_ERR_BADARG, "cannot write " + path.string());
        }
        std::cout << "wrote " << path.string() << "\n";
        return 0;
    }
    std::cout << text;
    return 0;
}

void print_sweep_header(std::ostream& out) {
    out << "# bwsim sweep format_version=1\n";
    out << "axis,value,scheduler,rho,gpu_task,gpu_slowdown,system_throttle_us\n";
}

void print_sweep_point(std::ostream& out, const SweepPoint& point) {
    out << point.axis << ',' << point.value << ',' << point.scheduler << ',' << point.rho
        << ',' << point.gpu_task << ',' << point.gpu_slowdown << ','
        << point.system_throttle_us << '\n';
}

int cmd_sweep(const std::string& path, const Overrides& overrides, const std::string& axis,
              std::int64_t budget_start, int points, const std::vector<double>& rho_list,
              int random_tasksets, std::uint64_t seed, const std::string& out_dir) {
    std::ostringstream csv;
    print_sweep_header(csv);

    auto run_point = [&](bwsim_scenario* scenario, SweepPoint point) -> int {
        std::string message;
        const int rc = run_and_summarize(scenario, point, message);
        if (rc != 0) {
            std::cerr << "error: sweep point failed: " << message << "\n";
            return rc;
        }
        print_sweep_point(csv, point);
        return 0;
    };

    if (random_tasksets > 0) {
        // Deterministic scenario series; each runs under cfs, tfs-1, tfs-3.
        for (int k = 0; k < random_tasksets; ++k) {
            for (const auto& [mode, rho] :
                 std::vector<std::pair<std::string, double>>{{"cfs", 0.0}, {"tfs", 1.0}, {"tfs", 3.0}}) {
                ScenarioHandle scenario;
                char* err = nullptr;
                bwsim_status status = bwsim_scenario_random(seed + static_cast<std::uint64_t>(k),
                                                            &scenario.ptr, &err);
                if (status != BWSIM_OK) return fail(status, take_error(err));
                std::string message;
                status = apply_overrides(scenario.ptr, overrides, message);
                if (status != BWSIM_OK) return fail(status, message);
                status = bwsim_scenario_set_scheduler(scenario.ptr, mode.c_str(), &err);
                if (status == BWSIM_OK && mode == "tfs") {
                    status = bwsim_scenario_set_rho(scenario.ptr, rho, &err);
                }
                if (status != BWSIM_OK) return fail(status, take_error(err));
                SweepPoint point;
                point.axis = "scenario";
                point.value = std::to_string(k);
                point.scheduler = mode == "cfs" ? "cfs" : "tfs-" + std::to_string(static_cast<int>(rho));
                point.rho = mode == "cfs" ? 0.0 : rho;
                if (const int rc = run_point(scenario.ptr, point); rc != 0) return rc;
            }
        }
    } else if (axis == "budget") {
        std::int64_t budget = budget_start;
        for (int i = 0; i < points; ++i, budget /= 2) {
            if (budget <= 0) break;
            ScenarioHandle scenario;
            std::string message;
            bwsim_status status = load_scenario(path, overrides, scenario, message);
            if (status != BWSIM_OK) return fail(status, message);
            char* err = nullptr;
            status = bwsim_scenario_set_budget_bytes(scenario.ptr, budget, &err);
            if (status != BWSIM_OK) return fail(status, take_error(err));
            SweepPoint point;
            point.axis = "budget_bytes";
            point.value = std::to_string(budget);
            point.scheduler = overrides.scheduler.value_or("(scenario)");
            point.rho = overrides.rho.value_or(0);
            if (const int rc = run_point(scenario.ptr, point); rc != 0) return rc;
        }
    } else {  // rho axis
        for (double rho : rho_list) {
            ScenarioHandle scenario;
            std::string message;
            bwsim_status status = load_scenario(path, overrides, scenario, message);
            if (status != BWSIM_OK) return fail(status, message);
            char* err = nullptr;
            status = bwsim_scenario_set_rho(scenario.ptr, rho, &err);
            if (status != BWSIM_OK) return fail(status, take_error(err));
            SweepPoint point;
            point.axis = "rho";
            point.value = std::to_string(rho);
            point.scheduler = overrides.scheduler.value_or("(scenario)");
            point.rho = rho;
            if (const int rc = run_point(scenario.ptr, point); rc != 0) return rc;
        }
    }

    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (!write_file(fs::path(out_dir) / "sweep.csv", csv.str())) {
            return fail(BWSIM_ERR_BADARG, "cannot write sweep.csv under " + out_dir);
        }
    }
    std::cout << csv.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bwsim: bandwidth-regulated CPU-GPU scheduling simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string name;
    std::string sim_out = ".";
    std::string analyze_out;
    std::string paper_out;
    std::string sweep_out;
    Overrides overrides;

    CLI::App* simulate = app.add_subcommand("simulate", "Run a scenario; write trace and metrics");
    simulate->add_option("scenario", scenario_path, "Scenario document (JSON)")->required();
    add_override_flags(simulate, overrides);
    simulate->add_option("--out", sim_out, "Output directory");

    CLI::App* analyze = app.add_subcommand("analyze", "Response-time analysis of the RT taskset");
    analyze->add_option("scenario", scenario_path, "Scenario document (JSON)")->required();
    analyze->add_option("--out", analyze_out, "Also write analysis.json here");

    CLI::App* paper = app.add_subcommand("paper-scenario", "Emit a built-in scenario");
    paper->add_option("name", name,
                      std::string("One of: ") + bwsim_builtin_names())
        ->required();
    paper->add_option("--out", paper_out, "Write <name>.json here instead of stdout");

    std::string axis = "budget";
    std::int64_t budget_start = 1'000'000;
    int points = 8;
    std::vector<double> rho_list;
    int random_tasksets = 0;
    std::uint64_t seed = 1;

    CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario across an axis; emit CSV");
    sweep->add_option("scenario", scenario_path, "Scenario document (JSON)");
    add_override_flags(sweep, overrides);
    sweep->add_option("--axis", axis, "budget (halving) or rho")
        ->check(CLI::IsMember({"budget", "rho"}));
    sweep->add_option("--budget-start", budget_start, "First budget in bytes per period");
    sweep->add_option("--points", points, "Number of halving steps");
    sweep->add_option("--rho-list", rho_list, "Rho values for --axis rho")->delimiter(',');
    sweep->add_option("--random-tasksets", random_tasksets,
                      "Generate N random scenarios and run each under cfs/tfs-1/tfs-3");
    sweep->add_option("--seed", seed, "Seed for --random-tasksets");
    sweep->add_option("--out", sweep_out, "Also write sweep.csv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (simulate->parsed()) return cmd_simulate(scenario_path, overrides, sim_out);
    if (analyze->parsed()) return cmd_analyze(scenario_path, analyze_out);
    if (paper->parsed()) return cmd_paper_scenario(name, paper_out);
    if (sweep->parsed()) {
        if (random_tasksets == 0 && scenario_path.empty()) {
            std::cerr << "error: sweep requires a scenario or --random-tasksets\n";
            return 1;
        }
        if (axis == "rho" && rho_list.empty() && random_tasksets == 0) {
            std::cerr << "error: --axis rho requires --rho-list\n";
            return 1;
        }
        return cmd_sweep(scenario_path, overrides, axis, budget_start, points, rho_list,
                         random_tasksets, seed, sweep_out);
    }
    return 1;
}
