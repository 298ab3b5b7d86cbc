// SPDX-License-Identifier: Apache-2.0
//
// Counter-based pseudo-random numbers. Every draw is a pure function of
// (seed, stream_a, stream_b, counter), so results do not depend on call
// order, thread schedule, or language. The recurrence is normative:
//
//   mix(z):   z += 0x9E3779B97F4A7C15
//             z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//             z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//             return z ^ (z >> 31)                      (all mod 2^64)
//   key(s, a, b)      = mix(mix(mix(s) ^ a) ^ b)
//   draw(s, a, b, c)  = mix(key(s, a, b) ^ c)
//   uniform(s,a,b,c)  = (draw(s, a, b, c) >> 11) * 2^-53          in [0, 1)
//   normal(s,a,b,c)   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2),
//                       u1 = uniform(s,a,b,2c), u2 = uniform(s,a,b,2c+1)
//
// The synthetic generator uses a = row index, b = column id. Library-internal
// streams use a = one of the StreamTag values below and b = a sub-index
// (tree index, epoch, ...), with c running over consecutive draws.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace helio {

constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix_mix(splitmix_mix(splitmix_mix(seed) ^ a) ^ b);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                     std::uint64_t c) noexcept {
  return splitmix_mix(stream_key(seed, a, b) ^ c);
}

constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;
double counter_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;

enum class StreamTag : std::uint64_t {
  split = 0xA11CE00000000001ULL,
  folds = 0xA11CE00000000002ULL,
  bootstrap = 0xA11CE00000000003ULL,
  feature_subset = 0xA11CE00000000004ULL,
  mlp_init = 0xA11CE00000000005ULL,
  mlp_shuffle = 0xA11CE00000000006ULL,
  quasi_shift = 0xA11CE00000000007ULL,
  gp_restart = 0xA11CE00000000008ULL,
  suggest_local = 0xA11CE00000000009ULL,
  noise_features = 0xA11CE0000000000AULL,
  curve_subset = 0xA11CE0000000000BULL,
};

// Sequential view over one (seed, a, b) stream; the counter advances per draw.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept
      : key_(stream_key(seed, a, b)) {}
  CounterRng(std::uint64_t seed, StreamTag tag, std::uint64_t b = 0) noexcept
      : CounterRng(seed, static_cast<std::uint64_t>(tag), b) {}

  std::uint64_t next_u64() noexcept { return splitmix_mix(key_ ^ counter_++); }
  double uniform() noexcept { return to_unit(next_u64()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  // Unbiased integer in [0, n) by rejection; n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates permutation of 0..n-1 drawn from the given stream.
std::vector<std::size_t> permutation(std::size_t n, CounterRng& rng);

// Halton sequence with a per-dimension random shift modulo 1 (Cranley-Patterson
// rotation) drawn from the quasi_shift stream of `seed`.
class ShiftedHalton {
 public:
  ShiftedHalton(std::size_t dims, std::uint64_t seed, std::uint64_t stream = 0);
  std::vector<double> point(std::uint64_t index) const;
  std::size_t dims() const noexcept { return shifts_.size(); }

 private:
  std::vector<double> shifts_;
};

}  // namespace helio
