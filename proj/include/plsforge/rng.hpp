#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace plsforge {

// Deterministic scalar stream: a fixed draw count per call, fully specified
// arithmetic on top of mt19937_64.  std::normal_distribution is
// implementation-defined, which would leak into the dataset determinism
// contract, so the normal transform is spelled out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform on (0, 1]
  double u01() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
  }

  // uniform on [-1, 1)
  double sym() { return u01() * 2.0 - 2.0 / 9007199254740992.0 - 1.0; }

  // standard normal, Box-Muller, two raw draws per value
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(u01()));
    const double t = 6.283185307179586476925286766559 * u01();
    return r * std::cos(t);
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // multiply-shift rejection-free map; bias is negligible for n << 2^64
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i) {
      std::swap(xs[i - 1], xs[below(i)]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

} // namespace plsforge
