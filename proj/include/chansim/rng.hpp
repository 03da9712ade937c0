#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "chansim/common.hpp"

namespace chansim {

// All randomness in the library flows from one master seed.  Streams are
// derived per (component, index): the component label is FNV-1a hashed, the
// index golden-ratio scrambled, and both are folded into the master seed with
// splitmix64 rounds.  Sampling primitives are implemented here (not via
// std::*_distribution) so byte-identical reruns do not depend on the standard
// library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).  Multiply-shift map; bias is at most n / 2^64.
  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(
        (static_cast<unsigned __int128>(u64()) * static_cast<std::uint64_t>(n)) >> 64);
  }

  // Index sampled proportionally to the (non-negative) weights.
  int categorical(const RVec& weights) {
    double total = weights.sum();
    double u = uniform01() * total;
    double acc = 0.0;
    for (int i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                          std::uint64_t index);

inline Rng derive_rng(std::uint64_t master, std::string_view component,
                      std::uint64_t index) {
  return Rng(derive_seed(master, component, index));
}

}  // namespace chansim
