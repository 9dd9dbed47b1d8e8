#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qtsim {

// Philox4x32-10 keyed counter function. Produces four 32-bit words per
// counter value; bit-exact across platforms and compilers.
inline std::array<std::uint32_t, 4> philox4x32(
    std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32);
        const std::uint32_t lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32);
        const std::uint32_t lo1 = std::uint32_t(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

// Seeded random stream with cheap independent substreams.
//
// Counter-based design: draw n of stream s under seed k is
// philox(counter = (n/4, s), key = k), so any (seed, stream) pair can be
// opened anywhere, in any order, on any thread, and yields the same
// sequence. Experiment runners give each trial its own stream id, which is
// what makes batch output independent of worker count.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint32_t next_u32() {
        if (buffer_pos_ == 4) {
            buffer_ = philox4x32(
                {std::uint32_t(block_), std::uint32_t(block_ >> 32),
                 std::uint32_t(stream_), std::uint32_t(stream_ >> 32)},
                {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
            ++block_;
            buffer_pos_ = 0;
        }
        return buffer_[buffer_pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; draws two uniforms per pair and caches
    // the second value.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffer_pos_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace qtsim
