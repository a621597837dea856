#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "specwindow/cache.hpp"

using namespace specwindow;

TEST_CASE("line_index matches plain div/mod arithmetic") {
    CacheGeometry g{64, 128, 4};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t addr = rng() % (1ull << 40);
        auto ref = oracles::place(addr, g.line_size, g.num_sets);
        LineRef got = line_index(addr, g);
        REQUIRE(got.set == ref.set);
        REQUIRE(got.tag == ref.tag);
    }
    // Same line iff same line_size-aligned block.
    CHECK(line_index(0, g) == line_index(63, g));
    CHECK(line_index(63, g) != line_index(64, g));
    // 128 sets of 64B lines: addr 64*128 wraps to set 0, tag 1.
    CHECK(line_index(64 * 128, g) == LineRef{0, 1});
}

TEST_CASE("hits, misses and LRU eviction order") {
    CacheGeometry g{16, 2, 2};
    CacheState c(g);

    // Three distinct tags in set 0: 0x00, 0x20, 0x40 (line = addr/16, set = line%2).
    CHECK_FALSE(c.access(0x00));
    CHECK_FALSE(c.access(0x20));
    CHECK(c.access(0x00));   // now MRU
    CHECK_FALSE(c.access(0x40));  // evicts 0x20, the LRU
    CHECK(c.access(0x00));
    CHECK_FALSE(c.access(0x20));  // was evicted
    // Set 1 is untouched by all of the above.
    CHECK(c.set_contents(1).empty());
}

TEST_CASE("flush removes exactly one line") {
    CacheState c(CacheGeometry{64, 128, 4});
    c.access(0x1000);
    c.access(0x1040);
    REQUIRE(c.resident(0x1000));
    c.flush_line(0x1010);  // same line as 0x1000
    CHECK_FALSE(c.resident(0x1000));
    CHECK(c.resident(0x1040));
    c.flush_line(0x1010);  // flushing an absent line is a no-op
    CHECK(c.resident(0x1040));
}

TEST_CASE("resident_lines is sorted and complete") {
    CacheState c(CacheGeometry{64, 4, 2});
    c.access(0x000);
    c.access(0x100);  // set 0, tag 1
    c.access(0x040);  // set 1
    auto lines = c.resident_lines();
    REQUIRE(lines.size() == 3);
    CHECK(std::is_sorted(lines.begin(), lines.end()));
    CHECK(lines[0] == LineRef{0, 0});
    CHECK(lines[1] == LineRef{0, 1});
    CHECK(lines[2] == LineRef{1, 0});
}

TEST_CASE("probe latency reflects residency and refills") {
    CacheState c(CacheGeometry{});
    CHECK(probe_latency(c, 0x2000, 2, 40) == 40);
    CHECK(probe_latency(c, 0x2000, 2, 40) == 2);  // the probe itself filled it
}

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS((CacheGeometry{3, 128, 4}.validate()), ConfigError);
    CHECK_THROWS_AS((CacheGeometry{2, 128, 4}.validate()), ConfigError);  // < 4
    CHECK_THROWS_AS((CacheGeometry{64, 100, 4}.validate()), ConfigError);
    CHECK_THROWS_AS((CacheGeometry{64, 128, 0}.validate()), ConfigError);
    CHECK_NOTHROW((CacheGeometry{4, 1, 1}.validate()));
}

TEST_CASE("random access/flush sequences match the reference cache") {
    std::mt19937_64 rng(4242);
    const CacheGeometry geoms[] = {{64, 128, 4}, {16, 2, 2}, {32, 8, 1}, {64, 1, 4}};
    for (const auto& g : geoms) {
        for (int seq = 0; seq < 50; ++seq) {
            CacheState c(g);
            oracles::RefCache ref(g.line_size, g.num_sets, g.ways);
            for (int step = 0; step < 300; ++step) {
                std::uint64_t addr = rng() % (g.capacity() * 4);
                if (rng() % 8 == 0) {
                    c.flush_line(addr);
                    ref.flush(addr);
                } else {
                    bool hit = c.access(addr);
                    bool ref_hit = ref.access(addr);
                    REQUIRE(hit == ref_hit);
                }
            }
            auto got = c.resident_lines();
            auto want = ref.resident();
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                REQUIRE(got[i].set == want[i].first);
                REQUIRE(got[i].tag == want[i].second);
            }
        }
    }
}
