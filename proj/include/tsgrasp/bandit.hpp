#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsgrasp/random.hpp"

namespace tsgrasp {

/// Per-arm Beta posterior over the Bernoulli success probability.
///
/// alpha[k] and beta[k] are pseudo-counts of successes and failures. They are
/// reals because a seeded prior S*Q is generally not integral.
class BeliefState {
 public:
  BeliefState() = default;
  BeliefState(std::vector<double> alphas, std::vector<double> betas);

  /// All-(1,1) belief: a uniform prior on every arm.
  static BeliefState uniform(std::size_t arm_count);

  std::size_t arm_count() const noexcept { return alphas_.size(); }
  std::span<const double> alphas() const noexcept { return alphas_; }
  std::span<const double> betas() const noexcept { return betas_; }
  double alpha(std::size_t arm) const;
  double beta(std::size_t arm) const;

  /// Conjugate update after pulling `arm` and observing `reward` in {0, 1}.
  void update(std::size_t arm, int reward);

  /// Sum over arms of alpha + beta.
  double total_pseudo_count() const noexcept;

  bool operator==(const BeliefState&) const = default;

 private:
  std::vector<double> alphas_;
  std::vector<double> betas_;
};

/// Hidden true success probability of every arm.
struct GroundTruth {
  std::vector<double> probs;

  GroundTruth() = default;
  explicit GroundTruth(std::vector<double> p);

  std::size_t arm_count() const noexcept { return probs.size(); }
  double best() const;
  std::size_t best_arm() const;
};

enum class PolicyKind { ThompsonSeeded, ThompsonUniform, Greedy, Oracle };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view name);

/// One draw from Beta(alpha, beta), computed as G_a / (G_a + G_b) from two
/// Gamma draws in log space. Throws ParameterDomainError for non-positive or
/// non-finite shapes.
double beta_sample(double alpha, double beta, Rng& rng);

/// Returns a copy of `belief` with the update applied.
BeliefState posterior_update(const BeliefState& belief, std::size_t arm, int reward);

/// alpha_k / (alpha_k + beta_k).
double posterior_mean(const BeliefState& belief, std::size_t arm);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Chooses an arm for one round.
///
/// Thompson variants draw one Beta sample per arm from `belief` and take the
/// argmax. Greedy takes the argmax of `prior_q` and Oracle the argmax of
/// `truth`; both ignore the belief. Only the vector the policy reads must be
/// sized to the arm count.
std::size_t select_arm(PolicyKind kind, const BeliefState& belief, std::span<const double> prior_q,
                       const GroundTruth& truth, Rng& rng);

/// Probability of choosing each arm under the current (frozen) state.
/// Monte-Carlo over `n_samples` argmax draws for Thompson policies, one-hot
/// otherwise.
std::vector<double> policy_action_distribution(PolicyKind kind, const BeliefState& belief,
                                               std::span<const double> prior_q,
                                               const GroundTruth& truth, std::size_t n_samples,
                                               Rng& rng);

/// Bernoulli(p) reward.
inline int sample_reward(double p, Rng& rng) { return uniform01(rng) < p ? 1 : 0; }

}  // namespace tsgrasp
