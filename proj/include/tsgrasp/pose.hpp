#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsgrasp/bandit.hpp"
#include "tsgrasp/random.hpp"

namespace tsgrasp {

/// What happens to the object after a failed grasp.
enum class FailureRule {
  Stay,                    // object remains in its current pose
  RedropExcludingCurrent,  // re-dropped into any pose but the current one
};

std::string_view to_string(FailureRule rule);
FailureRule failure_rule_from_string(std::string_view name);

/// Stable poses of one object: drop distribution, a disjoint arm set per
/// pose, and the failure transition. Immutable once constructed.
class PoseModel {
 public:
  PoseModel(std::vector<double> drop_probs, std::vector<GroundTruth> pose_truths,
            FailureRule failure_rule = FailureRule::Stay);

  /// One pose holding `truth`; the single-object desk environment.
  static PoseModel single(GroundTruth truth);

  std::size_t pose_count() const noexcept { return drop_probs_.size(); }
  std::span<const double> drop_probs() const noexcept { return drop_probs_; }
  const GroundTruth& truth(std::size_t pose) const { return pose_truths_.at(pose); }
  const std::vector<GroundTruth>& truths() const noexcept { return pose_truths_; }
  FailureRule failure_rule() const noexcept { return failure_rule_; }

  friend void to_json(nlohmann::json& j, const PoseModel& model);

 private:
  std::vector<double> drop_probs_;
  std::vector<GroundTruth> pose_truths_;
  FailureRule failure_rule_;
};

/// {"drop_probs": [...], "poses": [{"truth": [...]}, ...], "failure_rule": "stay"}
PoseModel pose_model_from_json(const nlohmann::json& j);

/// Samples the initial (or a fresh) resting pose from the drop distribution.
std::size_t drop(const PoseModel& model, Rng& rng);

/// Next pose after a grasp attempt in `current_pose` with outcome `reward`.
std::size_t transition(const PoseModel& model, std::size_t current_pose, int reward, Rng& rng);

struct Step {
  std::int64_t t = 0;  // 1-based round
  std::size_t pose = 0;
  std::size_t arm = 0;
  int reward = 0;
};

struct Trajectory {
  std::vector<Step> steps;
  /// Round at which each pose was first the resting pose. The initial drop is
  /// round 1, so it is recorded even when the horizon is zero.
  std::vector<std::optional<std::int64_t>> first_hit;
  std::uint64_t seed = 0;
};

/// Mutable state of one exploration episode: current pose and one belief per
/// pose. Beliefs of distinct poses never interact.
class Episode {
 public:
  /// Performs the initial drop using `rng`.
  Episode(const PoseModel& model, PolicyKind policy, std::vector<BeliefState> beliefs,
          std::vector<std::vector<double>> priors, Rng& rng);

  std::size_t current_pose() const noexcept { return pose_; }
  std::int64_t round() const noexcept { return round_; }
  const std::vector<BeliefState>& beliefs() const noexcept { return beliefs_; }
  const std::vector<std::vector<double>>& priors() const noexcept { return priors_; }
  PolicyKind policy() const noexcept { return policy_; }

  /// Select, pull, update the current pose's belief, then transition.
  Step step(Rng& rng);

 private:
  const PoseModel* model_;
  PolicyKind policy_;
  std::vector<BeliefState> beliefs_;
  std::vector<std::vector<double>> priors_;
  std::size_t pose_ = 0;
  std::int64_t round_ = 0;
};

/// Runs `horizon` rounds from a fresh drop. The generator is seeded with
/// `seed`; the trajectory records it. `beliefs` hold the final posteriors on
/// return.
Trajectory run_episode(const PoseModel& model, PolicyKind policy, std::vector<BeliefState>& beliefs,
                       const std::vector<std::vector<double>>& priors, std::int64_t horizon,
                       std::uint64_t seed);

/// Success probability of the snapshot policy over the poses other than
/// `excluded_pose`, weighted by the drop distribution conditioned on not
/// landing in it: sum_{j != i} lambda_j / (1 - lambda_i) * sum_k pi_j(k) p_j(k).
double eta_for_pose(const PoseModel& model, const std::vector<std::vector<double>>& policy_snapshot,
                    std::size_t excluded_pose);

/// sum_k pi(k) p(k) for one pose.
double policy_success_probability(std::span<const double> action_probs, const GroundTruth& truth);

}  // namespace tsgrasp
