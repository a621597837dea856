#pragma once

// Pattern history table: 256 two-bit saturating counters, direct-indexed
// by instruction index mod 256 (aliasing allowed). All counters start at
// weak-not-taken.

#include <array>
#include <cstdint>

namespace specwindow {

inline constexpr std::size_t kPhtEntries = 256;

enum Counter : std::uint8_t {
    kStrongNotTaken = 0,
    kWeakNotTaken = 1,
    kWeakTaken = 2,
    kStrongTaken = 3,
};

struct PredictorState {
    std::array<std::uint8_t, kPhtEntries> counters;

    PredictorState() { counters.fill(kWeakNotTaken); }

    bool predict(std::size_t branch_index) const {
        return counters[branch_index % kPhtEntries] >= kWeakTaken;
    }

    // Saturating: one step toward the observed outcome.
    void update(std::size_t branch_index, bool taken) {
        std::uint8_t& c = counters[branch_index % kPhtEntries];
        if (taken) {
            if (c < kStrongTaken) ++c;
        } else {
            if (c > kStrongNotTaken) --c;
        }
    }

    friend bool operator==(const PredictorState&, const PredictorState&) = default;
};

}  // namespace specwindow
