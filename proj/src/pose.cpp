#include "tsgrasp/pose.hpp"

#include <cmath>
#include <numeric>

#include "tsgrasp/errors.hpp"

namespace tsgrasp {

std::string_view to_string(FailureRule rule) {
  return rule == FailureRule::Stay ? "stay" : "redrop_excluding_current";
}

FailureRule failure_rule_from_string(std::string_view name) {
  if (name == "stay") return FailureRule::Stay;
  if (name == "redrop_excluding_current") return FailureRule::RedropExcludingCurrent;
  throw ConfigError("unknown failure_rule '" + std::string(name) + "'");
}

PoseModel::PoseModel(std::vector<double> drop_probs, std::vector<GroundTruth> pose_truths,
                     FailureRule failure_rule)
    : drop_probs_(std::move(drop_probs)),
      pose_truths_(std::move(pose_truths)),
      failure_rule_(failure_rule) {
  if (drop_probs_.empty()) throw ConfigError("pose model needs at least one pose");
  if (drop_probs_.size() != pose_truths_.size()) {
    throw ConfigError("drop_probs and poses differ in length");
  }
  double total = 0.0;
  for (const double p : drop_probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("drop probability outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("drop probabilities must sum to 1");
  for (const auto& truth : pose_truths_) {
    if (truth.arm_count() == 0) throw ConfigError("every pose needs at least one arm");
    if (!(truth.best() > 0.0)) throw ConfigError("every pose needs an arm with positive quality");
  }
  if (failure_rule_ == FailureRule::RedropExcludingCurrent && drop_probs_.size() < 2) {
    throw ConfigError("redrop_excluding_current needs at least two poses");
  }
}

PoseModel PoseModel::single(GroundTruth truth) {
  return PoseModel({1.0}, {std::move(truth)}, FailureRule::Stay);
}

void to_json(nlohmann::json& j, const PoseModel& model) {
  nlohmann::json poses = nlohmann::json::array();
  for (const auto& truth : model.pose_truths_) poses.push_back({{"truth", truth.probs}});
  j = {{"drop_probs", model.drop_probs_},
       {"poses", poses},
       {"failure_rule", std::string(to_string(model.failure_rule_))}};
}

PoseModel pose_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pose model must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "drop_probs" && key != "poses" && key != "failure_rule") {
      throw ConfigError("unknown pose model key '" + key + "'");
    }
  }
  try {
    std::vector<GroundTruth> truths;
    for (const auto& pose : j.at("poses")) {
      for (const auto& [key, _] : pose.items()) {
        if (key != "truth") throw ConfigError("unknown pose key '" + key + "'");
      }
      truths.emplace_back(pose.at("truth").get<std::vector<double>>());
    }
    const FailureRule rule = j.contains("failure_rule")
                                 ? failure_rule_from_string(j.at("failure_rule").get<std::string>())
                                 : FailureRule::Stay;
    return PoseModel(j.at("drop_probs").get<std::vector<double>>(), std::move(truths), rule);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed pose model: ") + e.what());
  } catch (const ParameterDomainError& e) {
    throw ConfigError(std::string("malformed pose model: ") + e.what());
  }
}

namespace {

// Inverse-CDF draw over `weights` (total mass `mass`), skipping `excluded`.
std::size_t categorical(std::span<const double> weights, double mass, std::size_t excluded,
                        Rng& rng) {
  const double u = uniform01(rng) * mass;
  double cumulative = 0.0;
  std::size_t last = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (i == excluded || weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last = i;
    if (u < cumulative) return i;
  }
  return last;  // roundoff in the cumulative sum
}

}  // namespace

std::size_t drop(const PoseModel& model, Rng& rng) {
  return categorical(model.drop_probs(), 1.0, model.pose_count(), rng);
}

std::size_t transition(const PoseModel& model, std::size_t current_pose, int reward, Rng& rng) {
  if (current_pose >= model.pose_count()) throw IndexError("pose index out of range");
  if (reward == 1) return drop(model, rng);
  if (model.failure_rule() == FailureRule::Stay) return current_pose;
  if (model.pose_count() < 2) {
    throw ConfigError("redrop_excluding_current needs at least two poses");
  }
  const double rest = 1.0 - model.drop_probs()[current_pose];
  if (!(rest > 0.0)) throw ConfigError("no drop probability outside the current pose");
  return categorical(model.drop_probs(), rest, current_pose, rng);
}

Episode::Episode(const PoseModel& model, PolicyKind policy, std::vector<BeliefState> beliefs,
                 std::vector<std::vector<double>> priors, Rng& rng)
    : model_(&model), policy_(policy), beliefs_(std::move(beliefs)), priors_(std::move(priors)) {
  const std::size_t poses = model.pose_count();
  if (beliefs_.size() != poses) throw ShapeError("one belief per pose required");
  if (priors_.empty()) priors_.resize(poses);
  if (priors_.size() != poses) throw ShapeError("one prior vector per pose required");
  for (std::size_t i = 0; i < poses; ++i) {
    const std::size_t k = model.truth(i).arm_count();
    if (beliefs_[i].arm_count() != k) throw ShapeError("belief size differs from pose arm count");
    if (policy_ == PolicyKind::Greedy && priors_[i].size() != k) {
      throw ShapeError("prior size differs from pose arm count");
    }
  }
  pose_ = drop(model, rng);
}

Step Episode::step(Rng& rng) {
  const GroundTruth& truth = model_->truth(pose_);
  BeliefState& belief = beliefs_[pose_];
  Step s;
  s.t = ++round_;
  s.pose = pose_;
  s.arm = select_arm(policy_, belief, priors_[pose_], truth, rng);
  s.reward = sample_reward(truth.probs[s.arm], rng);
  belief.update(s.arm, s.reward);
  pose_ = transition(*model_, pose_, s.reward, rng);
  return s;
}

Trajectory run_episode(const PoseModel& model, PolicyKind policy, std::vector<BeliefState>& beliefs,
                       const std::vector<std::vector<double>>& priors, std::int64_t horizon,
                       std::uint64_t seed) {
  if (horizon < 0) throw ParameterDomainError("horizon must be non-negative");
  Rng rng(seed);
  Episode episode(model, policy, std::move(beliefs), priors, rng);
  Trajectory traj;
  traj.seed = seed;
  traj.first_hit.assign(model.pose_count(), std::nullopt);
  traj.first_hit[episode.current_pose()] = 1;
  traj.steps.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const std::size_t pose = episode.current_pose();
    if (!traj.first_hit[pose]) traj.first_hit[pose] = t;
    traj.steps.push_back(episode.step(rng));
  }
  beliefs = episode.beliefs();
  return traj;
}

double policy_success_probability(std::span<const double> action_probs, const GroundTruth& truth) {
  if (action_probs.size() != truth.arm_count()) throw ShapeError("policy row size differs from arm count");
  return std::inner_product(action_probs.begin(), action_probs.end(), truth.probs.begin(), 0.0);
}

double eta_for_pose(const PoseModel& model, const std::vector<std::vector<double>>& policy_snapshot,
                    std::size_t excluded_pose) {
  const std::size_t poses = model.pose_count();
  if (poses < 2) throw ConfigError("eta needs at least two poses");
  if (excluded_pose >= poses) throw IndexError("pose index out of range");
  if (policy_snapshot.size() != poses) throw ShapeError("one policy row per pose required");
  const auto lambda = model.drop_probs();
  const double rest = 1.0 - lambda[excluded_pose];
  if (!(rest > 0.0)) {
    throw ParameterDomainError("eta undefined: excluded pose has drop probability 1");
  }
  double eta = 0.0;
  for (std::size_t j = 0; j < poses; ++j) {
    if (j == excluded_pose) continue;
    eta += lambda[j] / rest * policy_success_probability(policy_snapshot[j], model.truth(j));
  }
  return eta;
}

}  // namespace tsgrasp
