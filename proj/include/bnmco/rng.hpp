#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bnmco {

/// Portable random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the distributions are implemented here
/// rather than taken from <random> so that draws are identical across
/// standard library implementations.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64/splitmix64-streams/polar-normal/marsaglia-tsang-gamma";

  explicit Rng(std::uint64_t seed) : engine_(mix(seed)), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection removes modulo bias
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double normal();

  /// log of a Gamma(shape, 1) draw; works for small shapes without underflow.
  double log_gamma_variate(double shape);

  double gamma(double shape);

  double beta(double a, double b);

  /// An independent stream derived from this generator's seed.
  Rng split(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bnmco
