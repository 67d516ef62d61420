#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ctwrc {

/* Counter-based splittable generator (splitmix64 core).  Streams are derived
 * from (seed, id) so Monte Carlo trials can run in any order, or in parallel,
 * and still reproduce byte-identical results. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  /* Child stream seed for (seed, id).  Two rounds keep nearby ids apart. */
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t id) {
    return mix(mix(seed) ^ (id * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /* Uniform on the open interval (0, 1); never returns 0 or 1, so it is safe
   * inside log(). */
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /* Circularly symmetric complex Gaussian, unit variance (E|z|^2 = 1), via
   * Box-Muller in polar form: |z|^2 ~ Exp(1), phase uniform. */
  std::complex<double> cgauss() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(ang), r * std::sin(ang)};
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace ctwrc
