#pragma once

// Model and run configuration, including the strict JSON config-file
// schema (unknown keys are rejected before anything simulates).

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"

#include "specwindow/cache.hpp"
#include "specwindow/errors.hpp"

namespace specwindow {

using json = nlohmann::ordered_json;

enum class Mode { Seq, A53, Ooo };
enum class ObserverMode { FillTrace, FinalCache, Probe };

inline constexpr std::uint32_t kUnboundedDepth = 0xFFFFFFFFu;

inline std::string to_string(Mode m) {
    switch (m) {
        case Mode::Seq: return "seq";
        case Mode::A53: return "a53";
        case Mode::Ooo: return "ooo";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s) {
    if (s == "seq" || s == "SEQ") return Mode::Seq;
    if (s == "a53" || s == "A53") return Mode::A53;
    if (s == "ooo" || s == "OOO") return Mode::Ooo;
    throw ConfigError("unknown mode '" + s + "' (expected seq|a53|ooo)");
}

inline std::string to_string(ObserverMode m) {
    switch (m) {
        case ObserverMode::FillTrace: return "fill-trace";
        case ObserverMode::FinalCache: return "final-cache";
        case ObserverMode::Probe: return "probe";
    }
    return "?";
}

inline ObserverMode parse_observer(const std::string& s) {
    if (s == "fill-trace") return ObserverMode::FillTrace;
    if (s == "final-cache") return ObserverMode::FinalCache;
    if (s == "probe") return ObserverMode::Probe;
    throw ConfigError("unknown observer '" + s + "' (expected fill-trace|final-cache|probe)");
}

struct ModelConfig {
    Mode mode = Mode::A53;
    // Max instructions issued under an unresolved branch. Unset picks the
    // mode default: 2 for a53, unbounded for ooo; seq never speculates.
    std::optional<std::uint32_t> spec_depth;
    std::uint32_t resolve_delay = 2;  // cycles from operand arrival to resolution
    CacheGeometry geometry{};
    std::uint32_t hit_latency = 2;
    std::uint32_t miss_latency = 40;
    std::uint32_t alu_latency = 1;
    std::uint32_t probe_threshold = 20;  // Flush+Reload hot/cold cut

    std::uint32_t effective_depth() const {
        if (mode == Mode::Seq) return 0;
        if (spec_depth) return *spec_depth;
        return mode == Mode::A53 ? 2 : kUnboundedDepth;
    }

    // In the a53 model a value produced under a still-unresolved branch
    // cannot feed younger instructions; ooo forwards freely.
    bool forwarding_allowed() const { return mode == Mode::Ooo; }

    void validate() const {
        geometry.validate();
        if (hit_latency >= miss_latency)
            throw ConfigError("hit_latency must be < miss_latency");
        if (!(hit_latency < probe_threshold && probe_threshold <= miss_latency))
            throw ConfigError("probe_threshold must satisfy hit < threshold <= miss");
        if (alu_latency < 1) throw ConfigError("alu_latency must be >= 1");
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct RunConfig {
    ModelConfig model;
    std::uint64_t fuel = 100000;  // cycle budget per simulation
    ObserverMode observer = ObserverMode::FillTrace;
    std::string report_format = "json";  // json | table

    void validate() const {
        model.validate();
        if (fuel == 0) throw ConfigError("fuel must be > 0");
        if (report_format != "json" && report_format != "table")
            throw ConfigError("report format must be json or table");
    }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

}  // namespace detail

inline ModelConfig model_config_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"mode", "spec_depth", "resolve_delay", "hit_latency",
                                    "miss_latency", "alu_latency", "probe_threshold"},
                                "model");
    ModelConfig cfg;
    if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("spec_depth")) {
        const auto& d = j.at("spec_depth");
        if (d.is_string() && d.get<std::string>() == "unbounded")
            cfg.spec_depth = kUnboundedDepth;
        else if (d.is_number_unsigned())
            cfg.spec_depth = d.get<std::uint32_t>();
        else
            throw ConfigError("spec_depth must be a non-negative integer or \"unbounded\"");
    }
    cfg.resolve_delay = detail::get_or<std::uint32_t>(j, "resolve_delay", cfg.resolve_delay);
    cfg.hit_latency = detail::get_or<std::uint32_t>(j, "hit_latency", cfg.hit_latency);
    cfg.miss_latency = detail::get_or<std::uint32_t>(j, "miss_latency", cfg.miss_latency);
    cfg.alu_latency = detail::get_or<std::uint32_t>(j, "alu_latency", cfg.alu_latency);
    cfg.probe_threshold = detail::get_or<std::uint32_t>(j, "probe_threshold", cfg.probe_threshold);
    return cfg;
}

inline CacheGeometry cache_geometry_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"line_size", "num_sets", "ways"}, "cache");
    CacheGeometry g;
    g.line_size = detail::get_or<std::uint32_t>(j, "line_size", g.line_size);
    g.num_sets = detail::get_or<std::uint32_t>(j, "num_sets", g.num_sets);
    g.ways = detail::get_or<std::uint32_t>(j, "ways", g.ways);
    return g;
}

inline RunConfig run_config_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"model", "cache", "fuel", "observer", "report_format"},
                                "config");
    RunConfig cfg;
    if (j.contains("model")) cfg.model = model_config_from_json(j.at("model"));
    if (j.contains("cache")) cfg.model.geometry = cache_geometry_from_json(j.at("cache"));
    cfg.fuel = detail::get_or<std::uint64_t>(j, "fuel", cfg.fuel);
    if (j.contains("observer")) cfg.observer = parse_observer(j.at("observer").get<std::string>());
    cfg.report_format = detail::get_or<std::string>(j, "report_format", cfg.report_format);
    cfg.validate();
    return cfg;
}

inline json to_json(const ModelConfig& cfg) {
    json j;
    j["mode"] = to_string(cfg.mode);
    if (cfg.effective_depth() == kUnboundedDepth)
        j["spec_depth"] = "unbounded";
    else
        j["spec_depth"] = cfg.effective_depth();
    j["resolve_delay"] = cfg.resolve_delay;
    j["hit_latency"] = cfg.hit_latency;
    j["miss_latency"] = cfg.miss_latency;
    j["alu_latency"] = cfg.alu_latency;
    j["probe_threshold"] = cfg.probe_threshold;
    return j;
}

inline json to_json(const RunConfig& cfg) {
    json j;
    j["model"] = to_json(cfg.model);
    j["cache"] = {{"line_size", cfg.model.geometry.line_size},
                  {"num_sets", cfg.model.geometry.num_sets},
                  {"ways", cfg.model.geometry.ways}};
    j["fuel"] = cfg.fuel;
    j["observer"] = to_string(cfg.observer);
    j["report_format"] = cfg.report_format;
    return j;
}

inline std::uint32_t probe_latency(CacheState& c, std::uint64_t addr, const ModelConfig& cfg) {
    return probe_latency(c, addr, cfg.hit_latency, cfg.miss_latency);
}

}  // namespace specwindow
