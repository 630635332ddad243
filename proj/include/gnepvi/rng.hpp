#ifndef GNEPVI_RNG_HPP
#define GNEPVI_RNG_HPP

#include "gnepvi/types.hpp"

#include <cstdint>
#include <random>

namespace gnepvi {

/// Deterministic uniform generator. Distributions are hand-rolled from raw
/// mt19937_64 output so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  /// Standard normal via Box-Muller on our own uniforms.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Vec point_in_box(const Vec& lo, const Vec& hi) {
    Vec z(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) z[i] = uniform(lo[i], hi[i]);
    return z;
  }

  Vec unit_vector(Eigen::Index dim) {
    Vec v(dim);
    double n2 = 0.0;
    do {
      for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal();
      n2 = v.norm();
    } while (n2 < 1e-12);
    return v / n2;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Stable seed mixing for per-player / per-stage substreams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gnepvi

#endif
