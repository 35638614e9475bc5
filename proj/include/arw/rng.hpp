#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace arw {

/// splitmix64 finalizer; the basis for key derivation and seeding.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hierarchical stream key.  Streams are addressed by a chain of child
/// indices rooted at the experiment seed, so enlarging a window or adding
/// particles never perturbs the randomness of existing streams.
/// Not cryptographic; collisions are astronomically unlikely, not impossible.
struct StreamKey {
    std::uint64_t state = 0;

    static constexpr StreamKey root(std::uint64_t seed) {
        return StreamKey{mix64(seed ^ 0xa02b0d8f7e3c1a55ULL)};
    }

    constexpr StreamKey child(std::uint64_t index) const {
        return StreamKey{mix64(state ^ mix64(index * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL))};
    }

    constexpr StreamKey child_signed(std::int64_t index) const {
        return child(static_cast<std::uint64_t>(index));
    }

    template <std::size_t N>
    constexpr StreamKey child_coords(const std::array<std::int64_t, N>& coords) const {
        StreamKey k = *this;
        for (std::int64_t c : coords) k = k.child_signed(c);
        return k;
    }

    friend constexpr bool operator==(StreamKey a, StreamKey b) { return a.state == b.state; }
};

/// Stream purposes.  Every random draw in the library flows through a stream
/// keyed by (seed, owner, purpose), which makes couplings that share streams
/// between runs exact rather than approximate.
namespace purpose {
inline constexpr std::uint64_t kInitialCount = 1;  ///< initial particle count at a site
inline constexpr std::uint64_t kTape = 2;          ///< site instruction tape
inline constexpr std::uint64_t kSiteClock = 3;     ///< site Poisson mark clock
inline constexpr std::uint64_t kTrajectory = 4;    ///< labeled particle jump chain
inline constexpr std::uint64_t kSleepClock = 5;    ///< labeled particle sleep clock
inline constexpr std::uint64_t kWalk = 6;          ///< half-space test walk
inline constexpr std::uint64_t kReplica = 7;       ///< per-replica subtree
inline constexpr std::uint64_t kInstance = 8;      ///< per-instance subtree
inline constexpr std::uint64_t kShuffle = 9;       ///< toppling-order randomization
inline constexpr std::uint64_t kBranch = 10;       ///< branching dominator particle
inline constexpr std::uint64_t kTapeBlue = 11;     ///< two-color tape, blue
inline constexpr std::uint64_t kTapeRed = 12;      ///< two-color tape, red
inline constexpr std::uint64_t kClockBlue = 13;    ///< two-color mark clock, blue
inline constexpr std::uint64_t kClockRed = 14;     ///< two-color mark clock, red
} // namespace purpose

/// xoshiro256++ engine seeded from a StreamKey.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(StreamKey key) {
        std::uint64_t s = key.state;
        for (auto& word : s_) {
            s = mix64(s);
            word = s;
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

/// A single addressable random stream with the distributions the engines use.
class RngStream {
  public:
    explicit RngStream(StreamKey key) : engine_(key) {}

    std::uint64_t next_u64() { return engine_.next(); }

    /// Uniform on (0, 1]; never returns 0, so log() is always finite.
    double u01() {
        return static_cast<double>((engine_.next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Exponential with the given rate; rate 0 yields +infinity.
    double exponential(double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(u01()) / rate;
    }

    bool bernoulli(double p) { return u01() <= p; }

    /// Index into a cumulative probability table whose last entry is 1.
    std::size_t pick(const std::vector<double>& cumulative) {
        const double u = u01();
        std::size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cumulative[mid] >= u) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

    /// Uniform integer in [0, n) via 128-bit multiply.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(engine_.next()) * n) >> 64);
    }

    /// Poisson by multiplicative accumulation over chunks of mean at most 16,
    /// which keeps the running product away from underflow for any mean.
    std::int64_t poisson(double mean) {
        std::int64_t total = 0;
        while (mean > 0.0) {
            const double chunk = mean < 16.0 ? mean : 16.0;
            mean -= chunk;
            const double limit = std::exp(-chunk);
            double prod = 1.0;
            std::int64_t k = -1;
            do {
                ++k;
                prod *= u01();
            } while (prod > limit);
            total += k;
        }
        return total;
    }

  private:
    Xoshiro256pp engine_;
};

} // namespace arw
