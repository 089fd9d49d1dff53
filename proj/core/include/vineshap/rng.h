#ifndef VINESHAP_RNG_H_
#define VINESHAP_RNG_H_

#include <cstdint>
#include <random>

namespace vineshap {

// Mixes a master seed with stream identifiers (splitmix64 finalizer). Used to
// give every repetition, explanation and coalition its own reproducible stream.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Random stream with platform-independent variate generation. Only the
// mt19937_64 bit stream comes from the standard library; all distributions
// are implemented here so results do not depend on the standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double Uniform();
  // Uniform integer in [0, n).
  std::uint64_t Index(std::uint64_t n);
  double Normal();
  double Exponential();
  // Gamma(shape, 1) via Marsaglia-Tsang; shapes below one use the
  // U^(1/shape) boost.
  double Gamma(double shape);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vineshap

#endif  // VINESHAP_RNG_H_
