#pragma once

// Leakage checker: a gadget is SECURE under a model/observer when the
// observation is independent of the secret for every attacker input.
// The checker fixes a reference secret (first of the manifest domain)
// and compares obs(input, s) against obs(input, s_ref) for every other
// domain value and every valid and malicious input. Any difference is
// a leak, reported with the witness pair and the first diverging
// element of the two observations.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specwindow/gadget.hpp"

namespace specwindow {

struct LeakWitness {
    std::uint32_t input = 0;
    std::uint32_t secret_ref = 0;
    std::uint32_t secret = 0;
    std::string detail;  // human-readable first difference
};

struct CheckResult {
    std::string gadget;
    Mode mode = Mode::A53;
    ObserverMode observer = ObserverMode::FillTrace;
    bool leak = false;
    std::optional<LeakWitness> witness;
    std::uint64_t measurements = 0;

    std::string verdict() const { return leak ? "LEAK" : "SECURE"; }
};

namespace detail {

inline std::string describe_line(const LineRef& l) {
    return "(set " + std::to_string(l.set) + ", tag " + std::to_string(l.tag) + ")";
}

inline std::string first_difference(const Observation& ref, const Observation& got) {
    std::size_t n = std::min(ref.lines.size(), got.lines.size());
    for (std::size_t i = 0; i < n; ++i)
        if (!(ref.lines[i] == got.lines[i]))
            return "element " + std::to_string(i) + ": " + describe_line(ref.lines[i]) + " vs " +
                   describe_line(got.lines[i]);
    return "length " + std::to_string(ref.lines.size()) + " vs " +
           std::to_string(got.lines.size());
}

}  // namespace detail

inline CheckResult check_gadget(const Gadget& g, const RunConfig& cfg) {
    Runner runner(g, cfg);
    CheckResult res;
    res.gadget = g.manifest.name;
    res.mode = cfg.model.mode;
    res.observer = cfg.observer;

    std::vector<std::uint32_t> inputs = g.manifest.valid_inputs;
    inputs.insert(inputs.end(), g.manifest.malicious_inputs.begin(),
                  g.manifest.malicious_inputs.end());

    const auto& domain = g.manifest.secret_domain;
    std::uint32_t s_ref = domain.front();

    for (std::uint32_t input : inputs) {
        Measurement ref = runner.measure(input, s_ref);
        ++res.measurements;
        for (std::size_t i = 1; i < domain.size(); ++i) {
            Measurement got = runner.measure(input, domain[i]);
            ++res.measurements;
            if (got.obs == ref.obs) continue;
            res.leak = true;
            res.witness = LeakWitness{input, s_ref, domain[i],
                                      detail::first_difference(ref.obs, got.obs)};
            return res;
        }
    }
    return res;
}

}  // namespace specwindow
