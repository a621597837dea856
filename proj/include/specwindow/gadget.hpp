#pragma once

// Gadget corpus format and the measurement protocol shared by the
// attack harness, the leakage checker and the CLI.
//
// A gadget is an assembly file plus a JSON manifest binding its
// symbols to addresses and describing the experiment: how memory is
// initialised, which register carries the attacker-controlled input,
// where the secret lives, which lines the attacker can monitor, and
// which lines are flushed before the victim runs.
//
// One measurement is always:
//   plant memory (image + secret) -> mistrain (run the victim on valid
//   inputs, carrying cache and predictor) -> flush the manifest's flush
//   list and every monitored line -> run the victim once on the probed
//   input -> extract the observation.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "specwindow/config.hpp"
#include "specwindow/isa.hpp"
#include "specwindow/sim.hpp"

namespace specwindow {

struct MemInit {
    std::uint32_t addr = 0;
    std::vector<std::uint32_t> words;
};

struct MonitoredRegion {
    std::uint32_t base = 0;
    std::uint32_t stride = 0;
    std::uint32_t count = 0;

    std::uint32_t addr_of(std::uint32_t slot) const { return base + slot * stride; }
};

struct GadgetManifest {
    std::string name;
    std::string description;
    std::string asm_file;  // relative to the manifest
    SymbolTable symbols;
    std::vector<MemInit> mem_init;
    std::uint8_t input_reg = 0;
    std::vector<std::uint32_t> valid_inputs;
    std::vector<std::uint32_t> malicious_inputs;
    std::uint32_t secret_addr = 0;
    std::uint32_t secret_default = 0;
    std::vector<std::uint32_t> secret_domain;
    std::optional<MonitoredRegion> monitored;
    std::vector<std::uint32_t> flush_addrs;
    std::uint32_t leak_scale = 1;
    std::uint32_t training_iterations = 16;
    std::uint32_t mem_size = kDefaultMemSize;
};

struct Gadget {
    GadgetManifest manifest;
    Program program;
};

namespace detail {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string dir_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

// Addresses in manifests may be written as integers or symbol names.
inline std::uint32_t manifest_addr(const json& j, const SymbolTable& symbols,
                                   const std::string& ctx) {
    if (j.is_number_unsigned()) return j.get<std::uint32_t>();
    if (j.is_string()) {
        auto it = symbols.find(j.get<std::string>());
        if (it == symbols.end())
            throw ConfigError(ctx + ": unknown symbol '" + j.get<std::string>() + "'");
        return it->second;
    }
    throw ConfigError(ctx + ": expected address or symbol");
}

inline std::uint8_t manifest_reg(const json& j, const std::string& ctx) {
    std::string s = j.get<std::string>();
    if (s.size() == 2 && s[0] == 'R' && s[1] >= '0' && s[1] < '0' + kNumRegs)
        return static_cast<std::uint8_t>(s[1] - '0');
    throw ConfigError(ctx + ": bad register '" + s + "'");
}

}  // namespace detail

inline GadgetManifest gadget_manifest_from_json(const json& j) try {
    detail::reject_unknown_keys(
        j,
        {"name", "description", "asm", "symbols", "mem", "input", "secret", "monitored", "flush",
         "leak_scale", "training_iterations", "mem_size"},
        "gadget manifest");
    GadgetManifest m;
    m.name = j.at("name").get<std::string>();
    if (j.contains("description")) m.description = j.at("description").get<std::string>();
    m.asm_file = j.at("asm").get<std::string>();
    if (j.contains("symbols"))
        for (const auto& [k, v] : j.at("symbols").items()) {
            if (k.empty() || k[0] != '#')
                throw ConfigError("gadget manifest: symbol '" + k + "' must start with '#'");
            m.symbols[k] = v.get<std::uint32_t>();
        }
    if (j.contains("mem_size")) m.mem_size = j.at("mem_size").get<std::uint32_t>();
    if (j.contains("mem"))
        for (const auto& e : j.at("mem")) {
            detail::reject_unknown_keys(e, {"addr", "words"}, "gadget manifest mem entry");
            MemInit init;
            init.addr = detail::manifest_addr(e.at("addr"), m.symbols, "mem entry");
            init.words = e.at("words").get<std::vector<std::uint32_t>>();
            m.mem_init.push_back(std::move(init));
        }

    const json& in = j.at("input");
    detail::reject_unknown_keys(in, {"reg", "valid", "malicious"}, "gadget manifest input");
    m.input_reg = detail::manifest_reg(in.at("reg"), "input.reg");
    m.valid_inputs = in.at("valid").get<std::vector<std::uint32_t>>();
    m.malicious_inputs = in.at("malicious").get<std::vector<std::uint32_t>>();
    if (m.valid_inputs.empty()) throw ConfigError("gadget manifest: input.valid is empty");

    const json& sec = j.at("secret");
    detail::reject_unknown_keys(sec, {"addr", "default", "domain"}, "gadget manifest secret");
    m.secret_addr = detail::manifest_addr(sec.at("addr"), m.symbols, "secret.addr");
    m.secret_default = sec.at("default").get<std::uint32_t>();
    m.secret_domain = sec.at("domain").get<std::vector<std::uint32_t>>();
    if (m.secret_domain.size() < 2)
        throw ConfigError("gadget manifest: secret.domain needs at least two values");

    if (j.contains("monitored")) {
        const json& mon = j.at("monitored");
        detail::reject_unknown_keys(mon, {"base", "stride", "count"}, "gadget manifest monitored");
        MonitoredRegion r;
        r.base = detail::manifest_addr(mon.at("base"), m.symbols, "monitored.base");
        r.stride = mon.at("stride").get<std::uint32_t>();
        r.count = mon.at("count").get<std::uint32_t>();
        if (r.stride == 0 || r.count == 0)
            throw ConfigError("gadget manifest: monitored stride/count must be positive");
        m.monitored = r;
    }
    if (j.contains("flush"))
        for (const auto& f : j.at("flush"))
            m.flush_addrs.push_back(detail::manifest_addr(f, m.symbols, "flush entry"));
    if (j.contains("leak_scale")) m.leak_scale = j.at("leak_scale").get<std::uint32_t>();
    if (j.contains("training_iterations"))
        m.training_iterations = j.at("training_iterations").get<std::uint32_t>();
    return m;
} catch (const json::exception& e) {
    // Missing keys and wrong value types are manifest bugs, not crashes.
    throw ConfigError(std::string("gadget manifest: ") + e.what());
}

inline json gadget_manifest_to_json(const GadgetManifest& m) {
    json j;
    j["name"] = m.name;
    if (!m.description.empty()) j["description"] = m.description;
    j["asm"] = m.asm_file;
    json syms = json::object();
    for (const auto& [k, v] : m.symbols) syms[k] = v;
    j["symbols"] = syms;
    j["mem_size"] = m.mem_size;
    json mem = json::array();
    for (const auto& e : m.mem_init) mem.push_back({{"addr", e.addr}, {"words", e.words}});
    j["mem"] = mem;
    j["input"] = {{"reg", "R" + std::to_string(m.input_reg)},
                  {"valid", m.valid_inputs},
                  {"malicious", m.malicious_inputs}};
    j["secret"] = {{"addr", m.secret_addr},
                   {"default", m.secret_default},
                   {"domain", m.secret_domain}};
    if (m.monitored)
        j["monitored"] = {{"base", m.monitored->base},
                          {"stride", m.monitored->stride},
                          {"count", m.monitored->count}};
    j["flush"] = m.flush_addrs;
    j["leak_scale"] = m.leak_scale;
    j["training_iterations"] = m.training_iterations;
    return j;
}

inline Gadget load_gadget(const std::string& manifest_path) {
    json j;
    try {
        j = json::parse(detail::read_text_file(manifest_path));
    } catch (const json::exception& e) {
        throw ConfigError("'" + manifest_path + "': " + e.what());
    }
    Gadget g;
    g.manifest = gadget_manifest_from_json(j);
    std::string asm_path = detail::dir_of(manifest_path) + "/" + g.manifest.asm_file;
    g.program = assemble(detail::read_text_file(asm_path), g.manifest.symbols);
    return g;
}

// --- measurement protocol ---------------------------------------------

inline std::vector<std::uint32_t> monitored_addrs(const GadgetManifest& m) {
    std::vector<std::uint32_t> out;
    if (!m.monitored) return out;
    out.reserve(m.monitored->count);
    for (std::uint32_t i = 0; i < m.monitored->count; ++i) out.push_back(m.monitored->addr_of(i));
    return out;
}

// Memory image with the secret planted; the input register is set and
// every other register is zero.
inline ArchState initial_state(const Gadget& g, std::uint32_t input, std::uint32_t secret) {
    const GadgetManifest& m = g.manifest;
    ArchState s(m.mem_size);
    for (const auto& e : m.mem_init) {
        std::uint64_t a = e.addr;
        for (std::uint32_t w : e.words) {
            s.store_u32(a, w);
            a += 4;
        }
    }
    s.store_u32(m.secret_addr, secret);
    s.regs[m.input_reg] = input;
    return s;
}

struct Observation {
    ObserverMode mode = ObserverMode::FillTrace;
    // fill-trace: every cache touch of the victim run, in order.
    // final-cache: sorted resident lines after the run.
    // probe: monitored lines measured hot, in monitored order.
    std::vector<LineRef> lines;

    friend bool operator==(const Observation&, const Observation&) = default;
};

inline Observation extract_observation(const SimResult& r, const Gadget& g,
                                       const RunConfig& cfg) {
    Observation obs;
    obs.mode = cfg.observer;
    switch (cfg.observer) {
        case ObserverMode::FillTrace:
            for (const auto& ev : r.trace) obs.lines.push_back({ev.set, ev.tag});
            break;
        case ObserverMode::FinalCache:
            obs.lines = r.cache.resident_lines();
            break;
        case ObserverMode::Probe: {
            if (!g.manifest.monitored)
                throw ConfigError("gadget '" + g.manifest.name +
                                  "' has no monitored region; probe observer unavailable");
            CacheState reload = r.cache;  // probing fills lines; keep that local
            for (std::uint32_t a : monitored_addrs(g.manifest))
                if (probe_latency(reload, a, cfg.model) <= cfg.model.probe_threshold)
                    obs.lines.push_back(line_index(a, cfg.model.geometry));
            break;
        }
    }
    return obs;
}

struct Measurement {
    SimResult sim;
    Observation obs;
    std::uint64_t training_runs = 0;
};

class Runner {
public:
    Runner(const Gadget& g, const RunConfig& cfg) : g_(g), cfg_(cfg) { cfg_.model.validate(); }

    // One full measurement of obs(input, secret).
    Measurement measure(std::uint32_t input, std::uint32_t secret, bool train = true) const {
        PredictorState pred;
        CacheState cache(cfg_.model.geometry);
        Measurement m;
        if (train) {
            const auto& valid = g_.manifest.valid_inputs;
            for (std::uint32_t i = 0; i < g_.manifest.training_iterations; ++i) {
                ArchState s = initial_state(g_, valid[i % valid.size()], secret);
                SimResult r = simulate(g_.program, std::move(s), cfg_.model, pred, cache, cfg_.fuel);
                pred = r.predictor;
                cache = std::move(r.cache);
                ++m.training_runs;
            }
        }
        for (std::uint32_t a : g_.manifest.flush_addrs) cache.flush_line(a);
        for (std::uint32_t a : monitored_addrs(g_.manifest)) cache.flush_line(a);

        ArchState s = initial_state(g_, input, secret);
        m.sim = simulate(g_.program, std::move(s), cfg_.model, pred, cache, cfg_.fuel);
        m.obs = extract_observation(m.sim, g_, cfg_);
        return m;
    }

    const Gadget& gadget() const { return g_; }
    const RunConfig& config() const { return cfg_; }

private:
    const Gadget& g_;
    RunConfig cfg_;
};

// Architectural reference: the lines a sequential execution touches.
// The attack harness subtracts these from the probe result.
inline std::vector<LineRef> seq_touched_lines(const Gadget& g, std::uint32_t input,
                                              std::uint32_t secret, const RunConfig& cfg) {
    SeqResult r = run_seq(initial_state(g, input, secret), g.program, cfg.fuel);
    std::vector<LineRef> lines;
    for (const auto& ev : r.events) lines.push_back(line_index(ev.addr, cfg.model.geometry));
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    return lines;
}

}  // namespace specwindow
