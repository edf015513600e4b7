#include "tsgrasp/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsgrasp/errors.hpp"

namespace tsgrasp {

namespace {

void check_arm(std::size_t arm, std::size_t count) {
  if (arm >= count) {
    throw IndexError("arm index " + std::to_string(arm) + " out of range for " +
                     std::to_string(count) + " arms");
  }
}

bool valid_shape(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

BeliefState::BeliefState(std::vector<double> alphas, std::vector<double> betas)
    : alphas_(std::move(alphas)), betas_(std::move(betas)) {
  if (alphas_.size() != betas_.size()) throw ShapeError("alpha and beta vectors differ in length");
  if (alphas_.empty()) throw EmptyArmSetError();
  for (std::size_t k = 0; k < alphas_.size(); ++k) {
    if (!valid_shape(alphas_[k]) || !valid_shape(betas_[k])) {
      throw ParameterDomainError("Beta shape parameters must be positive (arm " +
                                 std::to_string(k) + ")");
    }
  }
}

BeliefState BeliefState::uniform(std::size_t arm_count) {
  return BeliefState(std::vector<double>(arm_count, 1.0), std::vector<double>(arm_count, 1.0));
}

double BeliefState::alpha(std::size_t arm) const {
  check_arm(arm, arm_count());
  return alphas_[arm];
}

double BeliefState::beta(std::size_t arm) const {
  check_arm(arm, arm_count());
  return betas_[arm];
}

void BeliefState::update(std::size_t arm, int reward) {
  check_arm(arm, arm_count());
  if (reward != 0 && reward != 1) throw ParameterDomainError("reward must be 0 or 1");
  alphas_[arm] += reward;
  betas_[arm] += 1 - reward;
}

double BeliefState::total_pseudo_count() const noexcept {
  return std::accumulate(alphas_.begin(), alphas_.end(), 0.0) +
         std::accumulate(betas_.begin(), betas_.end(), 0.0);
}

GroundTruth::GroundTruth(std::vector<double> p) : probs(std::move(p)) {
  for (const double x : probs) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterDomainError("success probability outside [0, 1]");
  }
}

double GroundTruth::best() const {
  if (probs.empty()) throw EmptyArmSetError();
  return *std::max_element(probs.begin(), probs.end());
}

std::size_t GroundTruth::best_arm() const { return argmax(probs); }

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ThompsonSeeded: return "thompson_seeded";
    case PolicyKind::ThompsonUniform: return "thompson_uniform";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Oracle: return "oracle";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  if (name == "thompson_seeded" || name == "tslp") return PolicyKind::ThompsonSeeded;
  if (name == "thompson_uniform" || name == "ts_uniform") return PolicyKind::ThompsonUniform;
  if (name == "greedy") return PolicyKind::Greedy;
  if (name == "oracle") return PolicyKind::Oracle;
  throw ConfigError("unknown policy kind '" + std::string(name) + "'");
}

double beta_sample(double alpha, double beta, Rng& rng) {
  if (!valid_shape(alpha) || !valid_shape(beta)) {
    throw ParameterDomainError("Beta shape parameters must be positive and finite");
  }
  const double log_x = log_gamma_sample(alpha, rng);
  const double log_y = log_gamma_sample(beta, rng);
  // x / (x + y) == 1 / (1 + exp(log_y - log_x))
  return 1.0 / (1.0 + std::exp(log_y - log_x));
}

BeliefState posterior_update(const BeliefState& belief, std::size_t arm, int reward) {
  BeliefState next = belief;
  next.update(arm, reward);
  return next;
}

double posterior_mean(const BeliefState& belief, std::size_t arm) {
  const double a = belief.alpha(arm);
  return a / (a + belief.beta(arm));
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw EmptyArmSetError();
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::size_t select_arm(PolicyKind kind, const BeliefState& belief, std::span<const double> prior_q,
                       const GroundTruth& truth, Rng& rng) {
  switch (kind) {
    case PolicyKind::Greedy:
      return argmax(prior_q);
    case PolicyKind::Oracle:
      return argmax(truth.probs);
    case PolicyKind::ThompsonSeeded:
    case PolicyKind::ThompsonUniform:
      break;
  }
  const std::size_t k_arms = belief.arm_count();
  if (k_arms == 0) throw EmptyArmSetError();
  const auto alphas = belief.alphas();
  const auto betas = belief.betas();
  std::size_t best = 0;
  double best_draw = -1.0;
  for (std::size_t k = 0; k < k_arms; ++k) {
    const double draw = beta_sample(alphas[k], betas[k], rng);
    if (draw > best_draw) {
      best_draw = draw;
      best = k;
    }
  }
  return best;
}

std::vector<double> policy_action_distribution(PolicyKind kind, const BeliefState& belief,
                                               std::span<const double> prior_q,
                                               const GroundTruth& truth, std::size_t n_samples,
                                               Rng& rng) {
  if (n_samples == 0) throw ParameterDomainError("n_samples must be positive");
  if (kind == PolicyKind::Greedy || kind == PolicyKind::Oracle) {
    const std::size_t k_arms = kind == PolicyKind::Greedy ? prior_q.size() : truth.arm_count();
    std::vector<double> dist(k_arms, 0.0);
    dist[select_arm(kind, belief, prior_q, truth, rng)] = 1.0;
    return dist;
  }
  std::vector<std::size_t> counts(belief.arm_count(), 0);
  for (std::size_t s = 0; s < n_samples; ++s) ++counts[select_arm(kind, belief, prior_q, truth, rng)];
  std::vector<double> dist(counts.size());
  const double n = static_cast<double>(n_samples);
  std::transform(counts.begin(), counts.end(), dist.begin(),
                 [n](std::size_t c) { return static_cast<double>(c) / n; });
  return dist;
}

}  // namespace tsgrasp
