#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "gaitsim/rng.hpp"

using namespace gaitsim;

TEST_CASE("same seed reproduces the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());
  Rng c(43);
  int differs = 0;
  Rng a2(42);
  for (int i = 0; i < 100; ++i) differs += a2.uniform() != c.uniform();
  CHECK(differs > 90);
}

TEST_CASE("uniform stays in [0, 1) and matches the engine formula") {
  Rng rng(7);
  std::mt19937_64 engine(7);
  for (int i = 0; i < 10000; ++i) {
    const double expect = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    const double got = rng.uniform();
    CHECK(got == expect);
    CHECK(got >= 0.0);
    CHECK(got < 1.0);
  }
}

TEST_CASE("ranged uniform respects its bounds") {
  Rng rng(3);
  double lo = 1.0, hi = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(-2.5, 4.0);
    CHECK(x >= -2.5);
    CHECK(x < 4.0);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  // Should come close to both ends over 10k draws.
  CHECK(lo < -2.3);
  CHECK(hi > 3.8);
}

TEST_CASE("uniform_index covers [0, n) uniformly") {
  Rng rng(11);
  std::vector<int> hits(5, 0);
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t k = rng.uniform_index(5);
    REQUIRE(k < 5);
    ++hits[k];
  }
  for (int k = 0; k < 5; ++k) {
    CHECK(hits[k] > draws / 5 - 600);
    CHECK(hits[k] < draws / 5 + 600);
  }
  CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("normal draws match Box-Muller on the raw uniforms") {
  // Reconstruct each normal from the same two underlying uniform draws.
  Rng rng(19);
  Rng shadow(19);
  for (int i = 0; i < 1000; ++i) {
    double u1 = shadow.uniform();
    while (u1 <= 0.0) u1 = shadow.uniform();
    const double u2 = shadow.uniform();
    const double expect =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    CHECK(rng.normal() == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("normal has standard moments") {
  Rng rng(23);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
  CHECK(rng.normal(10.0, 0.0) == 10.0);
}

TEST_CASE("sign is a fair coin over {-1, +1}") {
  Rng rng(5);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s = rng.sign();
    CHECK((s == 1.0 || s == -1.0));
    plus += s > 0.0;
  }
  CHECK(plus > 4700);
  CHECK(plus < 5300);
}

TEST_CASE("derive does not advance the parent") {
  Rng a(77), b(77);
  (void)a.derive(1, 2);
  (void)a.derive(3);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("derive separates streams by id and repeats exactly") {
  Rng parent(123);
  Rng c1 = parent.derive(4, 9);
  Rng c2 = parent.derive(4, 9);
  Rng c3 = parent.derive(5, 9);
  Rng c4 = parent.derive(4, 10);
  int same13 = 0, same14 = 0;
  for (int i = 0; i < 200; ++i) {
    const double x1 = c1.uniform();
    CHECK(x1 == c2.uniform());
    same13 += x1 == c3.uniform();
    same14 += x1 == c4.uniform();
  }
  CHECK(same13 < 5);
  CHECK(same14 < 5);
}

TEST_CASE("derive depends on the parent state, not just the seed") {
  Rng a(55), b(55);
  (void)b.uniform();  // advance b only
  Rng ca = a.derive(8, 8);
  Rng cb = b.derive(8, 8);
  int same = 0;
  for (int i = 0; i < 200; ++i) same += ca.uniform() == cb.uniform();
  CHECK(same < 5);
}

TEST_CASE("serialize round-trips the generator state") {
  Rng rng(99);
  for (int i = 0; i < 137; ++i) (void)rng.uniform();
  const std::string text = rng.serialize();
  Rng copy = Rng::deserialize(text);
  for (int i = 0; i < 500; ++i) CHECK(rng.uniform() == copy.uniform());
}

TEST_CASE("mix64 is deterministic and sensitive to its input") {
  CHECK(mix64(1234567) == mix64(1234567));
  // Nearby inputs should map to distant outputs (avalanche).
  std::set<std::uint64_t> outs;
  for (std::uint64_t x = 1; x <= 64; ++x) {
    outs.insert(mix64(x));
    const int flipped = std::popcount(mix64(x) ^ mix64(x + 1));
    CHECK(flipped > 10);
  }
  CHECK(outs.size() == 64);
}
