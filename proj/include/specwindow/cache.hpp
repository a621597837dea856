#pragma once

// Set-associative LRU cache with write-allocate fills. Line presence is
// the side channel: speculative fills persist across squashes, and
// probe_latency turns residency into the cycle counts an attacker sees.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "specwindow/errors.hpp"

namespace specwindow {

struct CacheGeometry {
    std::uint32_t line_size = 64;  // bytes, power of two, >= 4
    std::uint32_t num_sets = 128;  // power of two
    std::uint32_t ways = 4;

    std::uint64_t capacity() const {
        return std::uint64_t{line_size} * num_sets * ways;
    }

    void validate() const {
        auto pow2 = [](std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; };
        if (!pow2(line_size) || line_size < 4)
            throw ConfigError("cache line_size must be a power of two >= 4");
        if (!pow2(num_sets)) throw ConfigError("cache num_sets must be a power of two");
        if (ways < 1) throw ConfigError("cache ways must be >= 1");
    }

    friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

struct LineRef {
    std::uint64_t set = 0;
    std::uint64_t tag = 0;
    friend bool operator==(const LineRef&, const LineRef&) = default;
    friend auto operator<=>(const LineRef&, const LineRef&) = default;
};

inline LineRef line_index(std::uint64_t addr, const CacheGeometry& g) {
    std::uint64_t line = addr / g.line_size;
    return {line % g.num_sets, line / g.num_sets};
}

// Each set is an MRU-to-LRU ordered tag list. State is a pure function
// of the access/flush history.
class CacheState {
public:
    CacheState() : CacheState(CacheGeometry{}) {}
    explicit CacheState(const CacheGeometry& g) : geom_(g), sets_(g.num_sets) { g.validate(); }

    const CacheGeometry& geometry() const { return geom_; }

    // True on hit. On miss the line is filled, evicting the LRU way if
    // the set is full; the touched line becomes MRU either way.
    bool access(std::uint64_t addr) {
        auto [set, tag] = line_index(addr, geom_);
        auto& ways = sets_[set];
        auto it = std::find(ways.begin(), ways.end(), tag);
        bool hit = it != ways.end();
        if (hit) ways.erase(it);
        ways.insert(ways.begin(), tag);
        if (ways.size() > geom_.ways) ways.pop_back();
        return hit;
    }

    void flush_line(std::uint64_t addr) {
        auto [set, tag] = line_index(addr, geom_);
        auto& ways = sets_[set];
        auto it = std::find(ways.begin(), ways.end(), tag);
        if (it != ways.end()) ways.erase(it);
    }

    bool resident(std::uint64_t addr) const {
        auto [set, tag] = line_index(addr, geom_);
        const auto& ways = sets_[set];
        return std::find(ways.begin(), ways.end(), tag) != ways.end();
    }

    // MRU-first tags of one set.
    const std::vector<std::uint64_t>& set_contents(std::uint64_t set) const { return sets_[set]; }

    // Canonical sorted (set, tag) view of everything resident.
    std::vector<LineRef> resident_lines() const {
        std::vector<LineRef> out;
        for (std::uint64_t set = 0; set < sets_.size(); ++set)
            for (std::uint64_t tag : sets_[set]) out.push_back({set, tag});
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const CacheState&, const CacheState&) = default;

private:
    CacheGeometry geom_;
    std::vector<std::vector<std::uint64_t>> sets_;
};

// Timed re-access: the Flush+Reload measurement primitive. Updates the
// cache exactly like access().
inline std::uint32_t probe_latency(CacheState& c, std::uint64_t addr, std::uint32_t hit_latency,
                                   std::uint32_t miss_latency) {
    return c.access(addr) ? hit_latency : miss_latency;
}

}  // namespace specwindow
