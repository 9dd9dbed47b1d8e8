#include "qtsim/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

namespace {

using qtsim::philox4x32;
using qtsim::RngStream;

// ---------- keyed counter function ----------

// Published known-answer vectors for Philox4x32-10 (zero input, all-ones
// input, and the pi-digits input from the reference distribution).
TEST(Philox, KnownAnswerZero) {
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
    const std::uint32_t f = 0xffffffffu;
    const auto out = philox4x32({f, f, f, f}, {f, f});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPiDigits) {
    const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
}

// ---------- stream discipline ----------

TEST(RngStream, FirstWordsComeFromCounterZero) {
    RngStream rng(0, 0);
    const auto block = philox4x32({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(rng.next_u32(), block[0]);
    EXPECT_EQ(rng.next_u32(), block[1]);
    EXPECT_EQ(rng.next_u32(), block[2]);
    EXPECT_EQ(rng.next_u32(), block[3]);
    const auto next = philox4x32({1, 0, 0, 0}, {0, 0});
    EXPECT_EQ(rng.next_u32(), next[0]);
}

TEST(RngStream, SeedAndStreamEnterTheRightWords) {
    const std::uint64_t seed = 0x0123456789abcdefULL;
    const std::uint64_t stream = 0xfedcba9876543210ULL;
    RngStream rng(seed, stream);
    const auto block = philox4x32(
        {0, 0, 0x76543210u, 0xfedcba98u}, {0x89abcdefu, 0x01234567u});
    EXPECT_EQ(rng.next_u32(), block[0]);
}

TEST(RngStream, SameSeedSameSequence) {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u32(), b.next_u32());
}

TEST(RngStream, SubstreamsDoNotCollide) {
    // A window of draws from nearby streams should have no repeats; counter
    // mode makes streams disjoint by construction, this is a smoke check.
    std::vector<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 64; ++s) {
        RngStream rng(99, s);
        for (int i = 0; i < 16; ++i) seen.push_back(rng.next_u64());
    }
    std::sort(seen.begin(), seen.end());
    EXPECT_TRUE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST(RngStream, StreamsAreOrderIndependent) {
    // Reading stream 5 must not depend on whether stream 3 was read first.
    RngStream fresh(1234, 5);
    std::vector<std::uint32_t> expect;
    for (int i = 0; i < 8; ++i) expect.push_back(fresh.next_u32());

    RngStream other(1234, 3);
    for (int i = 0; i < 1000; ++i) other.next_u32();
    RngStream again(1234, 5);
    for (int i = 0; i < 8; ++i) EXPECT_EQ(again.next_u32(), expect[i]);
}

// ---------- variate quality ----------

TEST(RngStream, UniformIsInHalfOpenUnitInterval) {
    RngStream rng(7, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(RngStream, UniformMomentsMatch) {
    RngStream rng(20260817, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // mean 1/2 (sd of estimate ~ 6.5e-4), variance 1/12
    EXPECT_NEAR(mean, 0.5, 0.004);
    EXPECT_NEAR(var, 1.0 / 12.0, 0.004);
}

TEST(RngStream, NormalMomentsMatch) {
    RngStream rng(555, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0, sum4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
        sum3 += x * x * x;
        sum4 += x * x * x * x;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.02);
    EXPECT_NEAR(sum2 / n, 1.0, 0.03);
    EXPECT_NEAR(sum3 / n, 0.0, 0.08);
    EXPECT_NEAR(sum4 / n, 3.0, 0.15);
}

}  // namespace
