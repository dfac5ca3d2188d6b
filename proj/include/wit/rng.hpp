#pragma once

#include <cstdint>
#include <string_view>

namespace wit {

/// Deterministic, splittable random stream. Every stochastic component of the
/// engine (workload generator, MCTS, randomized skipping) owns a stream derived
/// from the session seed and a component name, so the components never perturb
/// each other's draws. The outputs are reproducible across platforms because
/// no <random> distributions are involved.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ kGolden)) {}

  RngStream(std::uint64_t seed, std::string_view name)
      : state_(mix(seed ^ fnv1a(name))) {}

  /// Child stream whose draws are independent of the parent's future draws.
  RngStream derive(std::string_view name) const {
    RngStream child(0);
    child.state_ = mix(state_ ^ fnv1a(name));
    return child;
  }

  std::uint64_t next_u64() {
    // splitmix64 step
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // 128-bit multiply keeps the draw unbiased enough for simulation use.
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * span;
    return lo + static_cast<std::int64_t>(wide >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  }

  std::uint64_t state_;
};

}  // namespace wit
