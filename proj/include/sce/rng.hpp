#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

// Counter-style random streams. Each logical unit of work (a Monte Carlo
// trial, a codeword) owns a stream keyed by (seed, index, salt), so results
// do not depend on execution order or worker count, and the same key always
// reproduces the same draws on any platform (no std::normal_distribution,
// whose output is implementation-defined).

namespace sce {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class StreamRng {
  public:
    StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0) {
        state_ = seed;
        (void)detail::splitmix64(state_);
        state_ ^= 0xD1B54A32D192ED03ULL * (stream + 1);
        (void)detail::splitmix64(state_);
        state_ ^= 0x8CB92BA72F3D8DD7ULL * (salt + 1);
        (void)detail::splitmix64(state_);
    }

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    // Uniform in the open interval (0,1).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unbiased-enough index in [0, m): Lemire's multiply-shift (bias < m/2^64).
    std::uint64_t next_index(std::uint64_t m) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * m) >> 64);
    }

    // Standard normal via Box-Muller; pairs are cached within the stream.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Salts keeping independent uses of the same (seed, index) apart.
inline constexpr std::uint64_t kSaltCodebook = 0x636f6465626f6f6bULL;
inline constexpr std::uint64_t kSaltTrial = 0x747269616c727374ULL;

}  // namespace sce
