#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsgrasp/bandit.hpp"
#include "tsgrasp/pose.hpp"
#include "tsgrasp/prior.hpp"

namespace tsgrasp {

struct PolicySpec {
  PolicyKind kind = PolicyKind::ThompsonUniform;
  double strength = 0.0;  // prior strength, ThompsonSeeded only

  /// "oracle", "greedy", "ts_uniform" or "tslp_s<strength>".
  std::string id() const;
};

struct MismatchBin {
  double lo = 0.0;
  double hi = 0.0;
  double weight = 0.0;
};

/// Value levels given to a calibrated prior. Every option keeps the prior's
/// ranking (and so its mismatch) exactly; only the magnitudes change.
struct PriorLevels {
  enum class Kind {
    Raw,    // clamp(truth + noise) as calibrated
    Truth,  // the truth's own sorted values, assigned by prior rank
    Spaced  // evenly spaced on [lo, hi] by prior rank
  };
  Kind kind = Kind::Raw;
  double lo = 0.0;
  double hi = 1.0;

  std::vector<double> apply(std::span<const double> prior, std::span<const double> truth) const;
};

struct EnvironmentSpec {
  /// Fixed multi-pose object. When absent each environment is a single pose
  /// whose arms come from a synthetic truth pool.
  std::optional<PoseModel> pose_model;
  TruthSpec truth;         // arm_count is the pool size
  std::vector<double> mismatch_targets;  // environment e uses targets[e % size]
  std::vector<MismatchBin> mismatch_bins;  // otherwise targets are drawn from these
  double mismatch_tolerance = 0.02;
  std::size_t mismatch_sets = 10;
  PriorLevels prior_levels;
};

struct ExperimentConfig {
  std::size_t arm_count = 20;
  std::int64_t horizon = 500;
  std::int64_t eval_every = 10;
  std::size_t eval_samples = 100;
  std::vector<PolicySpec> policies;
  EnvironmentSpec environment;
  std::size_t environment_count = 100;
  std::size_t arm_set_resamples = 1;
  std::size_t runs_per_arm_set = 10;
  std::uint64_t master_seed = 0;

  /// Desk-sized defaults: 100 sparse single-pose environments of K = 20
  /// arms, priors at truth levels, targets spread like a real prior's
  /// mismatch histogram.
  static ExperimentConfig desk_defaults();

  void validate() const;
  std::size_t eval_points() const { return static_cast<std::size_t>(horizon / eval_every) + 1; }
};

struct RunRecord {
  std::string policy;
  std::size_t policy_index = 0;
  std::size_t env_id = 0;
  std::size_t arm_set_id = 0;
  std::size_t run_id = 0;
  std::vector<double> eval_curve;
  double sum_reward = 0.0;
  double scaled_sum = 0.0;  // sum_reward * 100 / eval points
  double mismatch = 0.0;
  std::uint64_t seed = 0;
};

struct EnvironmentInfo {
  std::size_t env_id = 0;
  double target_mismatch = 0.0;
  double achieved_mismatch = 0.0;
  double sigma = 0.0;
  bool reversed = false;
};

struct SkippedEnvironment {
  std::size_t env_id = 0;
  std::string reason;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<EnvironmentInfo> environments;
  std::vector<SkippedEnvironment> skipped;
};

/// Mean reward of `eval_samples` pulls from the frozen policy. The belief is
/// read only.
double evaluate_policy(PolicyKind kind, const BeliefState& belief, std::span<const double> prior_q,
                       const GroundTruth& truth, std::size_t eval_samples, Rng& rng);

/// Multi-pose variant: every sample first drops the object, then pulls from
/// that pose's frozen policy.
double evaluate_episode(const PoseModel& model, const Episode& episode, std::size_t eval_samples,
                        Rng& rng);

/// Runs every (environment, arm set, policy, run) job. `threads` = 1 takes the
/// serial reference path; 0 uses every OpenMP thread. Records come back
/// ordered by (policy, environment, arm set, run) whatever the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 0);

struct Stats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;         // sample standard deviation (n - 1)
  bool stddev_defined = false;  // false for a single value; stddev reported as 0
};

Stats describe(std::span<const double> values);

inline constexpr double kMismatchBinWidth = 0.05;
int mismatch_bin(double mismatch);

struct PolicySummary {
  std::string policy;
  Stats overall;
  std::map<int, Stats> bins;  // keyed by mismatch_bin()
};

struct SummaryTable {
  std::vector<PolicySummary> policies;  // in first-appearance order
};

SummaryTable aggregate(const std::vector<RunRecord>& records);

/// Seed-averaged cumulative regret of one policy on a fixed model:
/// mean and sample standard deviation after every step.
struct RegretStudy {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::size_t seeds = 0;
};

RegretStudy regret_study(const PoseModel& model, const PolicySpec& policy,
                         const std::vector<std::vector<double>>& prior_q, std::int64_t horizon,
                         std::size_t seeds, std::uint64_t master_seed, int threads = 0);

/// Welch two-sample t test; returns the one-sided p-value for mean(a) > mean(b).
double welch_one_sided_p(std::span<const double> a, std::span<const double> b);

}  // namespace tsgrasp
