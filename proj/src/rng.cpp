// SPDX-License-Identifier: Apache-2.0
#include "helio/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace helio {

namespace {

double box_muller(double u1, double u2) noexcept {
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

constexpr std::uint64_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                     43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

double radical_inverse(std::uint64_t index, std::uint64_t base) noexcept {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return to_unit(counter_draw(seed, a, b, c));
}

double counter_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return box_muller(counter_uniform(seed, a, b, 2 * c), counter_uniform(seed, a, b, 2 * c + 1));
}

double CounterRng::normal() noexcept {
  // Pairs are aligned on even counters so a stream matches counter_normal.
  if (counter_ % 2 != 0) ++counter_;
  const double u1 = uniform();
  const double u2 = uniform();
  return box_muller(u1, u2);
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

std::vector<std::size_t> permutation(std::size_t n, CounterRng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

ShiftedHalton::ShiftedHalton(std::size_t dims, std::uint64_t seed, std::uint64_t stream) : shifts_(dims) {
  CounterRng rng(seed, StreamTag::quasi_shift, stream);
  for (auto& s : shifts_) s = rng.uniform();
}

std::vector<double> ShiftedHalton::point(std::uint64_t index) const {
  std::vector<double> out(shifts_.size());
  constexpr std::size_t kBases = std::size(kPrimes);
  for (std::size_t d = 0; d < shifts_.size(); ++d) {
    // Dimensions past the prime table fall back to a scrambled index.
    const std::uint64_t base = kPrimes[d % kBases];
    const std::uint64_t idx = d < kBases ? index + 1 : splitmix_mix(index + d) >> 32;
    double v = radical_inverse(idx, base) + shifts_[d];
    out[d] = v - std::floor(v);
  }
  return out;
}

}  // namespace helio
