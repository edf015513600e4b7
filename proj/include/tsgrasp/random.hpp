#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace tsgrasp {

/// Generator used by every stochastic routine. Each run, Monte-Carlo chunk
/// and environment owns one, seeded through seed_stream().
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine word.
double uniform01(Rng& rng);

/// Uniform double in (0, 1]; safe to take the logarithm of.
double uniform_open0(Rng& rng);

/// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
double standard_normal(Rng& rng);

/// Natural log of a Gamma(shape, 1) draw.
///
/// shape >= 1: Marsaglia-Tsang squeeze/rejection on d = shape - 1/3.
/// shape < 1: draw Gamma(shape + 1) and multiply by U^(1/shape); kept in log
/// space so that tiny shapes (1e-3 and below) do not underflow to zero.
double log_gamma_sample(double shape, Rng& rng);

/// Uniform integer in [0, n). n must be positive. Uses rejection to stay unbiased.
std::uint64_t uniform_index(std::uint64_t n, Rng& rng);

/// Stable 64-bit tag for a string label (FNV-1a).
std::uint64_t label_tag(std::string_view label);

/// Derives a child seed from a master seed and an ordered label tuple.
///
/// The derivation is a SplitMix64 chain over (master, length, labels...), so
/// it is order sensitive, independent of execution order, and changes with
/// every label field.
std::uint64_t seed_stream(std::uint64_t master_seed, std::span<const std::uint64_t> labels);
std::uint64_t seed_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> labels);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace tsgrasp
