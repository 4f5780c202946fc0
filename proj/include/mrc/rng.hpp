// rng.hpp - counter-based pseudo-random generator (splitmix64 mix, v1).
//
// Every draw is a pure function of (seed, counter), so concurrent callers
// and repeated runs see identical streams. The scheme is: the k-th draw of
// stream `seed` is mix64(seed + (k+1) * GOLDEN) where mix64 is the
// splitmix64 finalizer. Substreams are derived by hashing a stream id into
// the seed.
#pragma once

#include <cstdint>

namespace mrc::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// k-th 64-bit value of the stream.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * kGolden);
}

// Derive an independent substream seed from (seed, stream id).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ 0xD1B54A32D192ED03ull ^ (stream * kGolden));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(at(seed, counter) >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be nonzero.
inline std::uint64_t below(std::uint64_t seed, std::uint64_t counter, std::uint64_t n) {
    return at(seed, counter) % n;
}

// A tiny stateful wrapper for call sites that want sequential draws.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t next_u64() { return at(seed_, counter_++); }
    double next_uniform01() { return uniform01(seed_, counter_++); }
    std::uint64_t next_below(std::uint64_t n) { return below(seed_, counter_++, n); }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace mrc::rng
