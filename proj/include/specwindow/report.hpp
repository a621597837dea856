#pragma once

// JSON report envelope shared by every CLI command, plus a validator
// for it so downstream tooling can rely on the layout. The same rules
// are written out as a schema document in docs/report_schema.json.

#include <cstdint>
#include <string>
#include <vector>

#include "specwindow/attack.hpp"
#include "specwindow/checker.hpp"
#include "specwindow/config.hpp"
#include "specwindow/gadget.hpp"

namespace specwindow {

inline constexpr int kReportSchemaVersion = 1;

inline json report_envelope(const std::string& command, const RunConfig& cfg) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = "specwindow";
    j["command"] = command;
    j["config"] = to_json(cfg);
    j["results"] = json::array();
    return j;
}

inline json observation_to_json(const Observation& obs) {
    json lines = json::array();
    for (const auto& l : obs.lines) lines.push_back({{"set", l.set}, {"tag", l.tag}});
    return {{"observer", to_string(obs.mode)}, {"lines", lines}};
}

inline json run_result_to_json(const std::string& gadget, Mode mode, std::uint32_t input,
                               std::uint32_t secret, const Measurement& m) {
    json regs = json::array();
    for (std::uint32_t r : m.sim.arch.regs) regs.push_back(r);
    return {{"gadget", gadget},
            {"mode", to_string(mode)},
            {"input", input},
            {"secret", secret},
            {"cycles", m.sim.cycles},
            {"halted", m.sim.arch.halted},
            {"regs", regs},
            {"training_runs", m.training_runs},
            {"frames_opened", m.sim.stats.frames_opened},
            {"squashes", m.sim.stats.squashes},
            {"max_frame_issued", m.sim.stats.max_frame_issued},
            {"speculative_events", m.sim.stats.speculative_events},
            {"observation", observation_to_json(m.obs)}};
}

inline json attack_result_to_json(const std::string& gadget, Mode mode, const AttackResult& a) {
    json j{{"gadget", gadget},
           {"mode", to_string(mode)},
           {"input", a.input},
           {"planted_secret", a.planted_secret},
           {"hot_slots", a.hot_slots},
           {"recovered_slots", a.recovered_slots},
           {"victim_cycles", a.victim_cycles},
           {"training_runs", a.training_runs},
           {"success", a.recovered_value && *a.recovered_value == a.planted_secret}};
    if (a.recovered_value)
        j["recovered_value"] = *a.recovered_value;
    else
        j["recovered_value"] = nullptr;
    return j;
}

inline json check_result_to_json(const CheckResult& c) {
    json j{{"gadget", c.gadget},
           {"mode", to_string(c.mode)},
           {"observer", to_string(c.observer)},
           {"verdict", c.verdict()},
           {"measurements", c.measurements}};
    if (c.witness)
        j["witness"] = {{"input", c.witness->input},
                        {"secret_ref", c.witness->secret_ref},
                        {"secret", c.witness->secret},
                        {"detail", c.witness->detail}};
    else
        j["witness"] = nullptr;
    return j;
}

// --- validation ---------------------------------------------------------

namespace detail {

inline void expect(bool ok, const std::string& msg, std::vector<std::string>& errs) {
    if (!ok) errs.push_back(msg);
}

inline bool has_uint(const json& j, const char* key) {
    return j.contains(key) && j.at(key).is_number_unsigned();
}

inline void validate_result_entry(const json& e, const std::string& command, std::size_t idx,
                                  std::vector<std::string>& errs) {
    std::string at = "results[" + std::to_string(idx) + "]";
    if (!e.is_object()) {
        errs.push_back(at + " must be an object");
        return;
    }
    expect(e.contains("gadget") && e.at("gadget").is_string(), at + ".gadget missing", errs);
    expect(e.contains("mode") && e.at("mode").is_string(), at + ".mode missing", errs);
    if (command == "run") {
        expect(has_uint(e, "cycles"), at + ".cycles missing", errs);
        expect(e.contains("halted") && e.at("halted").is_boolean(), at + ".halted missing", errs);
        expect(e.contains("regs") && e.at("regs").is_array() && e.at("regs").size() == kNumRegs,
               at + ".regs must list all registers", errs);
        expect(e.contains("observation") && e.at("observation").is_object(),
               at + ".observation missing", errs);
        if (e.contains("observation") && e.at("observation").is_object()) {
            const json& o = e.at("observation");
            expect(o.contains("observer") && o.at("observer").is_string(),
                   at + ".observation.observer missing", errs);
            expect(o.contains("lines") && o.at("lines").is_array(),
                   at + ".observation.lines missing", errs);
        }
    } else if (command == "attack") {
        expect(has_uint(e, "input"), at + ".input missing", errs);
        expect(has_uint(e, "planted_secret"), at + ".planted_secret missing", errs);
        expect(e.contains("hot_slots") && e.at("hot_slots").is_array(), at + ".hot_slots missing",
               errs);
        expect(e.contains("recovered_slots") && e.at("recovered_slots").is_array(),
               at + ".recovered_slots missing", errs);
        expect(e.contains("recovered_value"), at + ".recovered_value missing", errs);
        expect(e.contains("success") && e.at("success").is_boolean(), at + ".success missing",
               errs);
    } else if (command == "check") {
        expect(e.contains("observer") && e.at("observer").is_string(), at + ".observer missing",
               errs);
        bool verdict_ok = e.contains("verdict") && e.at("verdict").is_string() &&
                          (e.at("verdict") == "LEAK" || e.at("verdict") == "SECURE");
        expect(verdict_ok, at + ".verdict must be LEAK or SECURE", errs);
        expect(e.contains("witness"), at + ".witness missing (null when SECURE)", errs);
        if (e.contains("verdict") && e.at("verdict") == "LEAK")
            expect(e.contains("witness") && e.at("witness").is_object(),
                   at + ".witness required for LEAK", errs);
    }
}

}  // namespace detail

// Structural check of a report document. Empty result means valid.
inline std::vector<std::string> validate_report(const json& j) {
    std::vector<std::string> errs;
    if (!j.is_object()) return {"report must be a JSON object"};
    detail::expect(j.contains("schema_version") && j.at("schema_version") == kReportSchemaVersion,
                   "schema_version must be " + std::to_string(kReportSchemaVersion), errs);
    detail::expect(j.contains("tool") && j.at("tool") == "specwindow", "tool must be 'specwindow'",
                   errs);
    bool cmd_ok = j.contains("command") && j.at("command").is_string();
    detail::expect(cmd_ok, "command missing", errs);
    detail::expect(j.contains("config") && j.at("config").is_object(), "config missing", errs);
    detail::expect(j.contains("results") && j.at("results").is_array(), "results missing", errs);
    if (!cmd_ok || !j.contains("results") || !j.at("results").is_array()) return errs;
    std::string command = j.at("command").get<std::string>();
    if (command != "run" && command != "attack" && command != "check" && command != "fuzz" &&
        command != "corpus-list")
        errs.push_back("command must be run|attack|check|fuzz|corpus-list");
    for (std::size_t i = 0; i < j.at("results").size(); ++i)
        detail::validate_result_entry(j.at("results")[i], command, i, errs);
    return errs;
}

}  // namespace specwindow
