#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace gaitsim {

// Deterministic random stream. All randomness in the project flows through
// explicitly seeded instances of this class; the uniform/normal draws are
// implemented by hand so that sequences are reproducible across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    // rejection-free modulo bias is negligible for the small n used here,
    // but do the rejection anyway so shuffles are exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // standard normal via Box-Muller (cos branch only, no cached state)
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // sign drawn uniformly from {-1, +1}
  double sign() { return uniform() < 0.5 ? -1.0 : 1.0; }

  // independent child stream; mixing is splitmix64-style so that
  // (seed, a, b) tuples map to well-separated engine states
  Rng derive(std::uint64_t a, std::uint64_t b = 0) const;

  std::string serialize() const;
  static Rng deserialize(const std::string& text);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer, used for seed mixing
std::uint64_t mix64(std::uint64_t x);

}  // namespace gaitsim
