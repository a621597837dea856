#pragma once

// Flush+Reload against a gadget's monitored region. After the standard
// measurement (mistrain, flush, victim run) the attacker times a load
// of each monitored slot and keeps the hot ones. Slots a sequential
// execution of the victim would touch anyway are discarded; what is
// left must have been filled speculatively. When one slot remains and
// the gadget transmits at line granularity (leak_scale == line_size),
// the slot index is the recovered secret.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "specwindow/gadget.hpp"

namespace specwindow {

struct AttackResult {
    std::uint32_t input = 0;
    std::uint32_t planted_secret = 0;
    std::vector<std::uint32_t> hot_slots;        // monitored slots measured hot
    std::vector<std::uint32_t> recovered_slots;  // hot minus architectural accesses
    std::optional<std::uint32_t> recovered_value;
    std::uint64_t victim_cycles = 0;
    std::uint64_t training_runs = 0;
};

inline AttackResult flush_reload(const Gadget& g, const RunConfig& cfg, std::uint32_t input,
                                 std::uint32_t secret, bool train = true) {
    if (!g.manifest.monitored)
        throw ConfigError("gadget '" + g.manifest.name +
                          "' has no monitored region; flush+reload needs one");
    Runner runner(g, cfg);
    Measurement m = runner.measure(input, secret, train);

    AttackResult res;
    res.input = input;
    res.planted_secret = secret;
    res.victim_cycles = m.sim.cycles;
    res.training_runs = m.training_runs;

    const auto& geom = cfg.model.geometry;
    CacheState reload = m.sim.cache;  // probing fills lines; keep that local
    for (std::uint32_t slot = 0; slot < g.manifest.monitored->count; ++slot) {
        std::uint32_t addr = g.manifest.monitored->addr_of(slot);
        if (probe_latency(reload, addr, cfg.model) <= cfg.model.probe_threshold)
            res.hot_slots.push_back(slot);
    }

    std::vector<LineRef> arch = seq_touched_lines(g, input, secret, cfg);
    for (std::uint32_t slot : res.hot_slots) {
        LineRef line = line_index(g.manifest.monitored->addr_of(slot), geom);
        if (!std::binary_search(arch.begin(), arch.end(), line)) res.recovered_slots.push_back(slot);
    }

    // slot -> value only works when one slot maps to one value.
    if (res.recovered_slots.size() == 1 && g.manifest.leak_scale == geom.line_size &&
        g.manifest.monitored->stride == geom.line_size)
        res.recovered_value = res.recovered_slots.front();
    return res;
}

}  // namespace specwindow
