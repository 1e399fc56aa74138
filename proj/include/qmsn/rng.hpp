#pragma once
#include <cmath>
#include <cstdint>
#include <random>

namespace qmsn {

/// Derive a child-stream seed from (seed, stream). The map is injective in
/// `stream` for a fixed seed (odd-multiplier affine step followed by a
/// bijective splitmix64 finalizer), so counter-based children never collide.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic random stream. All draws are hand-rolled on top of the
/// raw mt19937_64 output so that byte-identical replay only depends on the
/// engine, never on library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  /// Independent child stream; safe to hand to a parallel worker.
  [[nodiscard]] Rng child(std::uint64_t stream) const {
    return Rng(mix_seed(seed_, stream));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Poisson sample. Knuth's product method for small means, normal
  /// approximation above (same scheme threshold detectors in this codebase
  /// ever exercise is the small-mean branch).
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean <= 30.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double p = 1.0;
      do {
        ++k;
        p *= uniform01();
      } while (p > limit);
      return k - 1;
    }
    const double g = normal(mean, std::sqrt(mean));
    return g <= 0.0 ? 0 : static_cast<std::uint64_t>(g + 0.5);
  }

  /// Bose-Einstein (geometric) photon-number sample with the given mean.
  std::uint64_t geometric_photons(double mean) {
    if (mean <= 0.0) return 0;
    const double q = mean / (1.0 + mean);
    const double u = uniform01();
    // smallest n with 1 - q^(n+1) > u
    const double n = std::log1p(-u) / std::log(q);
    return static_cast<std::uint64_t>(n);
  }

  std::uint64_t binomial(std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  double normal(double mean, double stddev) {
    // Box-Muller, no caching: one draw costs two uniforms but keeps the
    // stream position a pure function of the call sequence.
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qmsn
