#include "tsgrasp/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tsgrasp {

namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * kTwoPow53Inv; }

double uniform_open0(Rng& rng) { return (static_cast<double>(rng() >> 11) + 1.0) * kTwoPow53Inv; }

double standard_normal(Rng& rng) {
  const double u1 = uniform_open0(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double log_gamma_sample(double shape, Rng& rng) {
  if (shape < 1.0) {
    const double log_boost = std::log(uniform_open0(rng)) / shape;
    return log_gamma_sample(shape + 1.0, rng) + log_boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open0(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

std::uint64_t uniform_index(std::uint64_t n, Rng& rng) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

std::uint64_t label_tag(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t seed_stream(std::uint64_t master_seed, std::span<const std::uint64_t> labels) {
  std::uint64_t h = splitmix64(master_seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ labels.size());
  for (const std::uint64_t label : labels) h = splitmix64(h ^ splitmix64(label));
  return h;
}

std::uint64_t seed_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> labels) {
  return seed_stream(master_seed, std::span<const std::uint64_t>(labels.begin(), labels.size()));
}

}  // namespace tsgrasp
