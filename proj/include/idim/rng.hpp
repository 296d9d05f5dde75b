#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace idim {

/// Identity string recorded in calibration cache headers. Loading a cache
/// produced by a different generator is refused, since cached statistics are
/// only reproducible together with the stream that generated them.
inline constexpr std::string_view kRngId = "xoshiro256++/splitmix64";

namespace detail {

/// splitmix64 finalizer used as a pure 64-bit mixing function.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// xoshiro256++ with splitmix64 state expansion. Substreams are derived by
/// mixing a stream id into the seed, so stream (seed, i) is independent of
/// stream (seed, j) for i != j and independent of how many streams exist.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t base = detail::mix64(seed) ^ detail::mix64(0x517cc1b727220a95ULL ^ stream);
    std::uint64_t sm = base;
    for (auto& w : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  /// Derives the generator for a child stream, e.g. one calibration dimension
  /// or one benchmark instance. Children of distinct ids never overlap.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) { return Rng(seed, stream); }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller. The transform is fully specified here so
  /// that streams do not depend on any library's normal_distribution.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int s) {
    return (x << s) | (x >> (64 - s));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace idim
