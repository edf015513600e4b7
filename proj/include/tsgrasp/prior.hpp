#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "tsgrasp/bandit.hpp"
#include "tsgrasp/random.hpp"

namespace tsgrasp {

/// Quality estimates standing in for a learned grasp-quality network, plus the
/// prior strength S (pseudo-rounds of pre-learning experience).
struct PriorEstimate {
  std::vector<double> qualities;
  double strength = 1.0;

  PriorEstimate() = default;
  PriorEstimate(std::vector<double> q, double s);
};

/// Qualities are clamped to [kQualityClamp, 1 - kQualityClamp] before seeding
/// so that no shape parameter is zero.
inline constexpr double kQualityClamp = 1e-3;

/// alpha0 = S * Q, beta0 = S * (1 - Q) with Q clamped.
BeliefState seed_beliefs(const PriorEstimate& prior);

struct MismatchReport {
  double tau = 0.0;
  double mismatch = 0.0;
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t ties_prior = 0;  // tied in the prior only
  std::int64_t ties_truth = 0;  // tied in the truth only
  std::int64_t ties_joint = 0;  // tied in both; excluded from every other count
};

/// Kendall's tau-b between prior and truth rankings by exhaustive pair
/// enumeration, and the mismatch M = (1 - tau) / 2.
MismatchReport kendall_tau(std::span<const double> q_prior, std::span<const double> q_truth);

/// Mean mismatch over `n_sets` random `subset_size`-subsets of the aligned
/// pools. Subsets are drawn without replacement internally and independently
/// of one another. Sets with a fully tied ranking are skipped.
double averaged_mismatch(std::span<const double> prior_pool, std::span<const double> truth_pool,
                         std::size_t subset_size, std::size_t n_sets, Rng& rng);

/// Truth qualities drawn i.i.d. from Beta(a, b).
struct BetaFamily {
  double a = 2.0;
  double b = 5.0;
};

/// `n_good` arms near q_hi and the rest near q_lo, each offset by
/// U(-spread, spread) and clamped to [0, 1]. Mimics adversarial objects with
/// few robust grasps.
struct SparseProfile {
  std::size_t n_good = 1;
  double q_hi = 0.9;
  double q_lo = 0.05;
  double spread = 0.0;
};

struct TruthSpec {
  std::size_t arm_count = 0;
  std::variant<BetaFamily, SparseProfile> family = SparseProfile{};
};

inline constexpr int kTruthRetries = 100;

/// Draws a ground truth with at least one strictly positive arm, redrawing
/// up to kTruthRetries times before throwing GenerationError.
GroundTruth generate_ground_truth(const TruthSpec& spec, Rng& rng);

/// How synthesize_prior measures the mismatch it calibrates against.
struct MismatchSampling {
  std::size_t subset_size = 0;  // 0 = the whole pool
  std::size_t n_sets = 10;
};

struct PriorSynthesis {
  std::vector<double> qualities;
  double sigma = 0.0;
  bool reversed = false;  // noise was added to the rank-reversed truth
  double achieved_mismatch = 0.0;
};

inline constexpr int kCalibrationIterations = 50;
inline constexpr double kMaxNoiseScale = 10.0;
inline constexpr int kBracketDoublings = 17;  // first bracket ends at 10 * 2^-17

/// Builds prior qualities whose averaged mismatch against `truth` lies within
/// `tolerance` of `target`.
///
/// q_prior = clamp(base + sigma * z, 0, 1) with z a fixed standard-normal
/// vector and sigma searched on [0, kMaxNoiseScale]: doubling from
/// kMaxNoiseScale * 2^-17 until the target is crossed, then bisection, all
/// within kCalibrationIterations measurements. The base is
/// the truth itself for targets the forward noise can reach, and the
/// rank-reversed truth otherwise (this covers target >= 0.97 with sigma = 0).
/// Subsets for the measurement use one fixed stream so the measured mismatch
/// is a deterministic function of sigma. Throws CalibrationError carrying the
/// closest achieved value when the budget runs out.
PriorSynthesis synthesize_prior(const GroundTruth& truth, double target_mismatch, double tolerance,
                                const MismatchSampling& sampling, Rng& rng);

/// Replaces each value by the reference level of the same rank (sorted
/// reference, smallest to smallest). Tied values share the mean of their
/// levels. Pairwise order and ties are kept, so Kendall's tau against any
/// other vector is unchanged.
std::vector<double> rank_matched(std::span<const double> values, std::span<const double> reference);

/// Strictly increasing re-spacing of `values` onto [lo, hi] by rank: the
/// smallest maps to lo, the largest to hi, and tied values share their mean
/// rank. Every pairwise order and tie is kept, so Kendall's tau against any
/// other vector is unchanged.
std::vector<double> rank_spaced(std::span<const double> values, double lo, double hi);

/// Returns `values` with ties broken by offsets below 1e-9, order otherwise kept.
std::vector<double> break_ties(std::span<const double> values);

/// Aligned prior/truth columns of a quality CSV (header arm_id,q_prior,q_truth).
struct QualityTable {
  std::vector<std::int64_t> arm_ids;
  std::vector<double> q_prior;
  std::vector<double> q_truth;
};

QualityTable read_quality_csv(const std::filesystem::path& path);
void write_quality_csv(const std::filesystem::path& path, const QualityTable& table);

}  // namespace tsgrasp
