#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "tsgrasp/random.hpp"

using namespace tsgrasp;

TEST_CASE("uniform01 stays in [0, 1) and has mean 1/2") {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("standard_normal moments") {
  Rng rng(11);
  const int n = 200000;
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
}

TEST_CASE("gamma draws match mean and variance across the shape range") {
  for (const double shape : {0.005, 0.3, 1.0, 2.5, 40.0}) {
    CAPTURE(shape);
    Rng rng(3);
    const int n = 200000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = std::exp(log_gamma_sample(shape, rng));
      s1 += g;
      s2 += g * g;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    // Gamma(k, 1): mean k, variance k; standard error of the mean sqrt(k / n).
    CHECK(std::abs(mean - shape) < 5.0 * std::sqrt(shape / n));
    if (shape >= 0.3) CHECK(var == doctest::Approx(shape).epsilon(0.05));
  }
}

TEST_CASE("uniform_index covers its range evenly") {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[uniform_index(7, rng)];
  for (const int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("seed_stream is deterministic and order sensitive") {
  CHECK(seed_stream(1, {2, 3, 4}) == seed_stream(1, {2, 3, 4}));
  CHECK(seed_stream(1, {2, 3, 4}) != seed_stream(1, {2, 4, 3}));
  CHECK(seed_stream(1, {2, 3}) != seed_stream(1, {2, 3, 0}));
  CHECK(seed_stream(1, {2, 3, 4}) != seed_stream(2, {2, 3, 4}));
  CHECK(label_tag("learn") != label_tag("eval"));
}

TEST_CASE("seed_stream: labels differing in one field never collide") {
  Rng rng(99);
  std::set<std::uint64_t> seen;
  int collisions = 0;
  for (int i = 0; i < 100000; ++i) {
    std::vector<std::uint64_t> a(5);
    for (auto& x : a) x = uniform_index(1000, rng);
    auto b = a;
    const auto field = uniform_index(5, rng);
    b[field] = (b[field] + 1 + uniform_index(999, rng)) % 1000;
    const std::uint64_t master = rng();
    if (seed_stream(master, a) == seed_stream(master, b)) ++collisions;
  }
  CHECK(collisions == 0);
}
