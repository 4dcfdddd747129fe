#include "bwsim/scenario_json.hpp"

#include <json.hpp>

#include <string>

namespace bwsim {

namespace {

using nlohmann::json;

[[noreturn]] void syntax_error(const std::string& field, const std::string& message) {
    throw ScenarioError(ScenarioError::Kind::Syntax, field, message);
}

[[noreturn]] void invariant_error(const std::string& field, const std::string& message) {
    throw ScenarioError(ScenarioError::Kind::Invariant, field, message);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            invariant_error(where + "." + item.key(),
                            where + ": unknown field \"" + item.key() + "\"");
        }
    }
}

double require_number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) syntax_error(where + "." + key, where + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number()) syntax_error(where + "." + key, where + "." + key + " must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) syntax_error(where + "." + key, where + "." + key + " must be a number");
    return v.get<double>();
}

std::int64_t int_or(const json& obj, const std::string& where, const char* key,
                    std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        syntax_error(where + "." + key, where + "." + key + " must be an integer");
    }
    return v.get<std::int64_t>();
}

std::string require_string(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) syntax_error(where + "." + key, where + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_string()) syntax_error(where + "." + key, where + "." + key + " must be a string");
    return v.get<std::string>();
}

SegmentKind parse_segment_kind(const std::string& name, const std::string& where) {
    if (name == "compute") return SegmentKind::CpuCompute;
    if (name == "sync_copy") return SegmentKind::SyncCopy;
    if (name == "async_copy") return SegmentKind::AsyncCopy;
    if (name == "kernel") return SegmentKind::KernelLaunch;
    if (name == "device_sync") return SegmentKind::DeviceSync;
    if (name == "stream_sync") return SegmentKind::StreamSync;
    if (name == "thread_sync") return SegmentKind::ThreadSync;
    if (name == "configure_call") return SegmentKind::ConfigureCall;
    invariant_error(where + ".kind", where + ": unknown segment kind \"" + name + "\"");
}

ContentionParams parse_slowdown(const json& obj, const std::string& where) {
    check_keys(obj, where, {"mode", "alpha", "bw_ref_bytes_per_ms"});
    ContentionParams params;
    const std::string mode = obj.contains("mode") ? require_string(obj, where, "mode") : "linear";
    if (mode == "none") {
        params.mode = ContentionParams::Mode::None;
    } else if (mode == "linear") {
        params.mode = ContentionParams::Mode::Linear;
    } else {
        invariant_error(where + ".mode", where + ": mode must be \"none\" or \"linear\"");
    }
    params.alpha_ppm = to_ppm(number_or(obj, where, "alpha", from_ppm(params.alpha_ppm)));
    params.bw_ref_bytes_per_ms =
        int_or(obj, where, "bw_ref_bytes_per_ms", params.bw_ref_bytes_per_ms);
    return params;
}

SystemConfig parse_config(const json& obj) {
    const std::string where = "config";
    check_keys(obj, where,
               {"n_cores", "rt_core", "regulation_period_ms", "throttle_budget_bytes",
                "max_budget_bytes", "tfs_rho", "ceiling_priority", "slowdown",
                "tick_resolution_ms"});
    SystemConfig cfg;
    cfg.n_cores = static_cast<int>(int_or(obj, where, "n_cores", cfg.n_cores));
    cfg.rt_core = static_cast<int>(int_or(obj, where, "rt_core", cfg.rt_core));
    cfg.regulation_period_us =
        ms_to_us(number_or(obj, where, "regulation_period_ms", us_to_ms(cfg.regulation_period_us)));
    cfg.throttle_budget_bytes =
        int_or(obj, where, "throttle_budget_bytes", cfg.throttle_budget_bytes);
    cfg.max_budget_bytes = int_or(obj, where, "max_budget_bytes", cfg.max_budget_bytes);
    cfg.tfs_rho_ppm = to_ppm(number_or(obj, where, "tfs_rho", from_ppm(cfg.tfs_rho_ppm)));
    cfg.ceiling_priority = static_cast<int>(int_or(obj, where, "ceiling_priority", cfg.ceiling_priority));
    cfg.tick_resolution_us =
        ms_to_us(number_or(obj, where, "tick_resolution_ms", us_to_ms(cfg.tick_resolution_us)));
    if (obj.contains("slowdown")) {
        if (!obj.at("slowdown").is_object()) {
            syntax_error("config.slowdown", "config.slowdown must be an object");
        }
        cfg.slowdown = parse_slowdown(obj.at("slowdown"), "config.slowdown");
    }
    return cfg;
}

Segment parse_segment(const json& obj, const std::string& where) {
    if (!obj.is_object()) syntax_error(where, where + " must be an object");
    check_keys(obj, where, {"kind", "ms", "stream"});
    Segment seg;
    seg.kind = parse_segment_kind(require_string(obj, where, "kind"), where);
    seg.duration_us = ms_to_us(number_or(obj, where, "ms", 0.0));
    if (obj.contains("stream")) {
        seg.stream = static_cast<int>(int_or(obj, where, "stream", 0));
    } else if (seg.kind == SegmentKind::AsyncCopy || seg.kind == SegmentKind::KernelLaunch ||
               seg.kind == SegmentKind::StreamSync) {
        seg.stream = 0;  // default stream
    }
    return seg;
}

RtTaskSpec parse_rt_task(const json& obj, std::size_t index) {
    const std::string where = "rt_tasks[" + std::to_string(index) + "]";
    if (!obj.is_object()) syntax_error(where, where + " must be an object");
    check_keys(obj, where, {"id", "period_ms", "priority", "segments"});
    RtTaskSpec task;
    task.id = require_string(obj, where, "id");
    task.period_us = ms_to_us(require_number(obj, where, "period_ms"));
    task.priority = static_cast<int>(int_or(obj, where, "priority", 1));
    if (obj.contains("segments")) {
        const json& segs = obj.at("segments");
        if (!segs.is_array()) syntax_error(where + ".segments", where + ".segments must be an array");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            task.segments.push_back(
                parse_segment(segs[i], where + ".segments[" + std::to_string(i) + "]"));
        }
    }
    return task;
}

BestEffortTaskSpec parse_be_task(const json& obj, std::size_t index) {
    const std::string where = "be_tasks[" + std::to_string(index) + "]";
    if (!obj.is_object()) syntax_error(where, where + " must be an object");
    check_keys(obj, where, {"id", "weight", "demand_bytes_per_ms", "core", "initial_vruntime_ms"});
    BestEffortTaskSpec task;
    task.id = require_string(obj, where, "id");
    task.weight_mil = to_weight_mil(number_or(obj, where, "weight", 1.0));
    task.demand_bytes_per_ms = int_or(obj, where, "demand_bytes_per_ms", 0);
    task.core = static_cast<int>(int_or(obj, where, "core", 1));
    task.initial_vruntime_ps =
        ms_to_us(number_or(obj, where, "initial_vruntime_ms", 0.0)) * kPsPerUs;
    return task;
}

json render_segment(const Segment& seg) {
    json obj;
    obj["kind"] = segment_kind_name(seg.kind);
    if (seg.duration_us != 0) obj["ms"] = us_to_ms(seg.duration_us);
    if (seg.stream.has_value()) obj["stream"] = *seg.stream;
    return obj;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        syntax_error("", e.what());
    }
    if (!doc.is_object()) syntax_error("", "scenario document must be a JSON object");
    check_keys(doc, "scenario",
               {"format_version", "config", "rt_tasks", "be_tasks", "sim_duration_ms",
                "scheduler"});

    Scenario scenario;
    if (doc.contains("config")) {
        if (!doc.at("config").is_object()) syntax_error("config", "config must be an object");
        scenario.config = parse_config(doc.at("config"));
    }
    if (doc.contains("rt_tasks")) {
        const json& arr = doc.at("rt_tasks");
        if (!arr.is_array()) syntax_error("rt_tasks", "rt_tasks must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            scenario.rt_tasks.push_back(parse_rt_task(arr[i], i));
        }
    }
    if (doc.contains("be_tasks")) {
        const json& arr = doc.at("be_tasks");
        if (!arr.is_array()) syntax_error("be_tasks", "be_tasks must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            scenario.be_tasks.push_back(parse_be_task(arr[i], i));
        }
    }
    scenario.sim_duration_us = ms_to_us(require_number(doc, "scenario", "sim_duration_ms"));
    const std::string mode =
        doc.contains("scheduler") ? require_string(doc, "scenario", "scheduler") : "cfs";
    if (mode == "cfs") {
        scenario.scheduler = SchedulerMode::Cfs;
    } else if (mode == "tfs") {
        scenario.scheduler = SchedulerMode::Tfs;
    } else {
        invariant_error("scheduler", "scheduler must be \"cfs\" or \"tfs\"");
    }

    validate_scenario(scenario);
    return scenario;
}

std::string render_scenario(const Scenario& scenario) {
    json doc;
    doc["format_version"] = 1;

    json cfg;
    cfg["n_cores"] = scenario.config.n_cores;
    cfg["rt_core"] = scenario.config.rt_core;
    cfg["regulation_period_ms"] = us_to_ms(scenario.config.regulation_period_us);
    cfg["throttle_budget_bytes"] = scenario.config.throttle_budget_bytes;
    if (scenario.config.max_budget_bytes != kUnlimitedBudgetBytes) {
        cfg["max_budget_bytes"] = scenario.config.max_budget_bytes;
    }
    cfg["tfs_rho"] = from_ppm(scenario.config.tfs_rho_ppm);
    cfg["ceiling_priority"] = scenario.config.ceiling_priority;
    cfg["tick_resolution_ms"] = us_to_ms(scenario.config.tick_resolution_us);
    json slow;
    slow["mode"] =
        scenario.config.slowdown.mode == ContentionParams::Mode::None ? "none" : "linear";
    slow["alpha"] = from_ppm(scenario.config.slowdown.alpha_ppm);
    slow["bw_ref_bytes_per_ms"] = scenario.config.slowdown.bw_ref_bytes_per_ms;
    cfg["slowdown"] = slow;
    doc["config"] = cfg;

    doc["rt_tasks"] = json::array();
    for (const RtTaskSpec& task : scenario.rt_tasks) {
        json obj;
        obj["id"] = task.id;
        obj["period_ms"] = us_to_ms(task.period_us);
        obj["priority"] = task.priority;
        obj["segments"] = json::array();
        for (const Segment& seg : task.segments) obj["segments"].push_back(render_segment(seg));
        doc["rt_tasks"].push_back(obj);
    }
    doc["be_tasks"] = json::array();
    for (const BestEffortTaskSpec& task : scenario.be_tasks) {
        json obj;
        obj["id"] = task.id;
        obj["weight"] = from_weight_mil(task.weight_mil);
        obj["demand_bytes_per_ms"] = task.demand_bytes_per_ms;
        obj["core"] = task.core;
        if (task.initial_vruntime_ps != 0) {
            obj["initial_vruntime_ms"] = us_to_ms(task.initial_vruntime_ps / kPsPerUs);
        }
        doc["be_tasks"].push_back(obj);
    }
    doc["sim_duration_ms"] = us_to_ms(scenario.sim_duration_us);
    doc["scheduler"] = scenario.scheduler == SchedulerMode::Cfs ? "cfs" : "tfs";

    return doc.dump(2) + "\n";
}

} // namespace bwsim
