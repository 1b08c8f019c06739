#pragma once
// Counter-based deterministic random numbers.
//
// Every draw is a pure function of (seed, stream, counter): the generator
// applies the splitmix64 finalizer to  seed_key + counter·φ64  where φ64 is
// the 64-bit golden-ratio constant.  Because there is no hidden state beyond
// the counter, runs are reproducible bit-for-bit regardless of how draws are
// interleaved across objects, and independent streams are obtained by mixing
// a stream index into the key.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace speclab {

namespace detail {
inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}
}  // namespace detail

class counter_rng {
  public:
    explicit counter_rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(detail::splitmix64_finalize(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

    // Next raw 64-bit word.
    std::uint64_t next_u64() {
        return detail::splitmix64_finalize(key_ + (counter_++) * 0x9E3779B97F4A7C15ull);
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Integer uniform in [0, n) by rejection-free scaling (n << 2^64 here,
    // so the modulo bias is far below anything observable).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller; draws exactly two words per call so the
    // stream position is call-count deterministic.
    double normal() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace speclab
