#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tsgrasp/pose.hpp"

namespace tsgrasp {

/// Parameters of the pose-coverage question: drop probability of the target
/// pose, success probability of the policy elsewhere (eta), and the horizon.
struct CoverageQuery {
  double lambda_i = 0.0;
  double eta = 0.0;
  std::int64_t horizon = 1;

  void validate() const;
};

/// Probability of resting in the target pose at least once within T rounds,
/// by the binomial double sum
///   lambda [1 + sum_{k=2}^T sum_{j=2}^k C(k-2, j-2) ((1-lambda) eta)^(j-1) (1-eta)^(k-j)].
/// Binomial coefficients are carried as running log terms and each inner
/// sum is a log-sum-exp, so large T neither overflows nor needs factorials.
/// O(T^2).
double coverage_double_sum(const CoverageQuery& q);

/// Same probability from the two-state chain: 1 - (1-lambda)(1-eta lambda)^(T-1).
double coverage_closed_form(const CoverageQuery& q);

/// Probability of never seeing a pose with drop probability `epsilon` within
/// T rounds. Evaluated as the complementary binomial sum
///   (1-eps) sum_{j=0}^{T-1} C(T-1, j) ((1-eps) eta)^j (1-eta)^(T-1-j)
/// which equals 1 - coverage_double_sum without the cancellation.
double miss_probability(double epsilon, double eta, std::int64_t horizon);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::int64_t trials = 0;
  std::int64_t hits = 0;
};

/// Trials are split into fixed chunks of this size, each with its own
/// generator seeded from (seed, chunk index).
inline constexpr std::int64_t kMonteCarloChunk = 8192;

/// Simulates the abstract two-state chain: round 1 is a drop that hits with
/// probability lambda; afterwards each round is a failure (1 - eta), a
/// success re-dropping elsewhere (eta (1 - lambda)) or a success re-dropping
/// into the target (eta lambda). OpenMP over chunks.
MonteCarloEstimate coverage_monte_carlo(const CoverageQuery& q, std::int64_t trials,
                                        std::uint64_t seed);

/// Reference implementation: the same chunks, run in order on one thread.
MonteCarloEstimate coverage_monte_carlo_serial(const CoverageQuery& q, std::int64_t trials,
                                               std::uint64_t seed);

/// Realised regret in pose `pose`: sum over rounds spent there of
/// (best success probability - pulled arm's success probability).
double per_pose_regret(const Trajectory& trajectory, const PoseModel& model, std::size_t pose);

/// Cumulative realised regret after each step, over all poses.
std::vector<double> cumulative_regret(const Trajectory& trajectory, const PoseModel& model);

struct RegretLedger {
  std::vector<double> per_pose_regret;
  std::vector<std::int64_t> pose_rounds;
  std::vector<double> drop_probs;
  std::int64_t total_rounds = 0;
  double total = 0.0;  // sum_l lambda_l * per_pose_regret[l]
};

/// Drop-probability weighted regret over poses.
RegretLedger weighted_regret(std::span<const double> per_pose, std::span<const double> drop_probs,
                             std::span<const std::int64_t> pose_rounds);

/// Builds the ledger straight from a trajectory.
RegretLedger regret_ledger(const Trajectory& trajectory, const PoseModel& model);

struct RegretBound {
  double value = 0.0;
  std::vector<std::size_t> excluded_poses;  // lambda_l > 0 but T lambda_l <= 1
};

/// constant * sum_l lambda_l^(3/2) sqrt(K T ln(T lambda_l)): the per-pose
/// Thompson-sampling bound constant * sqrt(K T_l ln T_l) at T_l = lambda_l T,
/// weighted by lambda_l.
RegretBound regret_bound(std::span<const double> drop_probs, std::size_t arm_count,
                         std::int64_t horizon, double constant = 1.0);

}  // namespace tsgrasp
