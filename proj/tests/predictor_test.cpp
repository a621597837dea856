#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "specwindow/predictor.hpp"

using namespace specwindow;

TEST_CASE("fresh table predicts not-taken everywhere") {
    PredictorState p;
    for (std::size_t i = 0; i < kPhtEntries; ++i) {
        CHECK_FALSE(p.predict(i));
        CHECK(p.counters[i] == kWeakNotTaken);
    }
}

TEST_CASE("two-bit transitions match the state table") {
    // Every state against both outcomes.
    for (int state = 0; state <= 3; ++state) {
        for (bool taken : {false, true}) {
            PredictorState p;
            p.counters[7] = static_cast<std::uint8_t>(state);
            p.update(7, taken);
            CHECK(p.counters[7] == oracles::counter_next(state, taken));
        }
    }
}

TEST_CASE("prediction threshold matches the reference") {
    for (int state = 0; state <= 3; ++state) {
        PredictorState p;
        p.counters[0] = static_cast<std::uint8_t>(state);
        CHECK(p.predict(0) == oracles::counter_predicts_taken(state));
    }
}

TEST_CASE("random update walks stay in lockstep with the reference") {
    std::mt19937_64 rng(321);
    PredictorState p;
    int ref = 1;  // weak-not-taken
    for (int i = 0; i < 1000; ++i) {
        bool taken = rng() & 1;
        p.update(42, taken);
        ref = oracles::counter_next(ref, taken);
        REQUIRE(int(p.counters[42]) == ref);
        REQUIRE(p.predict(42) == oracles::counter_predicts_taken(ref));
    }
}

TEST_CASE("indices alias mod 256") {
    PredictorState p;
    p.update(3, true);
    p.update(3 + 256, true);
    CHECK(p.predict(3));
    CHECK(p.predict(3 + 512));
    CHECK_FALSE(p.predict(4));
}

TEST_CASE("two taken outcomes flip a fresh counter to predict taken") {
    PredictorState p;
    p.update(9, true);
    p.update(9, true);
    CHECK(p.predict(9));
}

TEST_CASE("a fresh weak-not-taken counter flips after a single taken outcome") {
    PredictorState p;
    p.update(9, true);
    CHECK(p.predict(9));
}

TEST_CASE("strong-not-taken needs two taken outcomes, not one") {
    PredictorState p;
    p.counters[9] = kStrongNotTaken;
    p.update(9, true);
    CHECK_FALSE(p.predict(9));
    p.update(9, true);
    CHECK(p.predict(9));
}

TEST_CASE("a trained branch survives one contrary outcome") {
    PredictorState p;
    for (int i = 0; i < 5; ++i) p.update(9, true);
    p.update(9, false);
    CHECK(p.predict(9));
}

TEST_CASE("saturation holds at both ends") {
    PredictorState p;
    for (int i = 0; i < 10; ++i) p.update(0, true);
    CHECK(p.counters[0] == kStrongTaken);
    for (int i = 0; i < 10; ++i) p.update(0, false);
    CHECK(p.counters[0] == kStrongNotTaken);
}
