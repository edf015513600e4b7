#include "tsgrasp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsgrasp/errors.hpp"
#include "tsgrasp/random.hpp"

namespace tsgrasp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exponent * log_base with the convention 0^0 = 1.
double power_log(double exponent, double log_base) {
  return exponent == 0.0 ? 0.0 : exponent * log_base;
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// log sum_{m=0}^{n} C(n, m) exp(m * log_a + (n - m) * log_b + extra)
double log_binomial_sum(std::int64_t n, double log_a, double log_b, double extra) {
  double log_choose = 0.0;
  double max_term = kNegInf;
  // Two passes: the first finds the largest term, the second accumulates.
  for (std::int64_t m = 0; m <= n; ++m) {
    const double term = log_choose + power_log(static_cast<double>(m), log_a) +
                        power_log(static_cast<double>(n - m), log_b) + extra;
    max_term = std::max(max_term, term);
    if (m < n) log_choose += std::log(static_cast<double>(n - m)) - std::log(static_cast<double>(m + 1));
  }
  if (max_term == kNegInf) return kNegInf;
  log_choose = 0.0;
  double scaled = 0.0;
  for (std::int64_t m = 0; m <= n; ++m) {
    const double term = log_choose + power_log(static_cast<double>(m), log_a) +
                        power_log(static_cast<double>(n - m), log_b) + extra;
    scaled += std::exp(term - max_term);
    if (m < n) log_choose += std::log(static_cast<double>(n - m)) - std::log(static_cast<double>(m + 1));
  }
  return max_term + std::log(scaled);
}

double clamp_unit(double p) {
  // Roundoff guard only; excursions are at the 1e-15 level.
  return std::clamp(p, 0.0, 1.0);
}

enum class ChainCase { Fail, SuccessElsewhere, SuccessIntoTarget };

std::int64_t simulate_chunk(const CoverageQuery& q, std::int64_t trials, Rng& rng) {
  const double hit = q.eta * q.lambda_i;
  const double fail = 1.0 - q.eta;
  std::int64_t hits = 0;
  for (std::int64_t n = 0; n < trials; ++n) {
    if (uniform01(rng) < q.lambda_i) {
      ++hits;
      continue;
    }
    for (std::int64_t round = 2; round <= q.horizon; ++round) {
      const double u = uniform01(rng);
      const ChainCase c = u < hit          ? ChainCase::SuccessIntoTarget
                          : u < hit + fail ? ChainCase::Fail
                                           : ChainCase::SuccessElsewhere;
      if (c == ChainCase::SuccessIntoTarget) {
        ++hits;
        break;
      }
    }
  }
  return hits;
}

MonteCarloEstimate finish(std::int64_t hits, std::int64_t trials) {
  MonteCarloEstimate est;
  est.trials = trials;
  est.hits = hits;
  est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  est.standard_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
  return est;
}

std::int64_t chunk_trials(std::int64_t chunk, std::int64_t trials) {
  return std::min(kMonteCarloChunk, trials - chunk * kMonteCarloChunk);
}

}  // namespace

void CoverageQuery::validate() const {
  if (!(lambda_i >= 0.0 && lambda_i <= 1.0)) throw ParameterDomainError("lambda outside [0, 1]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterDomainError("eta outside [0, 1]");
  if (horizon < 1) throw ParameterDomainError("horizon must be at least 1");
}

double coverage_double_sum(const CoverageQuery& q) {
  q.validate();
  const double log_a = safe_log((1.0 - q.lambda_i) * q.eta);
  const double log_b = safe_log(1.0 - q.eta);
  // Inner sum for k: sum_{m=0}^{k-2} C(k-2, m) a^(m+1) b^(k-2-m).
  double sum = 1.0;
  double compensation = 0.0;
  for (std::int64_t k = 2; k <= q.horizon; ++k) {
    const double log_inner = log_binomial_sum(k - 2, log_a, log_b, log_a);
    if (log_inner == kNegInf) continue;
    const double y = std::exp(log_inner) - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  return clamp_unit(q.lambda_i * sum);
}

double coverage_closed_form(const CoverageQuery& q) {
  q.validate();
  if (q.horizon == 1 || q.lambda_i == 1.0) return q.lambda_i;
  const double stay = 1.0 - q.eta * q.lambda_i;
  if (stay == 0.0) return 1.0;
  const double log_miss = std::log1p(-q.lambda_i) +
                          static_cast<double>(q.horizon - 1) * std::log1p(-q.eta * q.lambda_i);
  return clamp_unit(-std::expm1(log_miss));
}

double miss_probability(double epsilon, double eta, std::int64_t horizon) {
  CoverageQuery{epsilon, eta, horizon}.validate();
  const double log_lead = safe_log(1.0 - epsilon);
  if (log_lead == kNegInf) return 0.0;
  const double log_a = safe_log((1.0 - epsilon) * eta);
  const double log_b = safe_log(1.0 - eta);
  const double log_miss = log_binomial_sum(horizon - 1, log_a, log_b, log_lead);
  return log_miss == kNegInf ? 0.0 : clamp_unit(std::exp(log_miss));
}

MonteCarloEstimate coverage_monte_carlo_serial(const CoverageQuery& q, std::int64_t trials,
                                               std::uint64_t seed) {
  q.validate();
  if (trials < 1) throw ParameterDomainError("trials must be positive");
  const std::int64_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::int64_t hits = 0;
  for (std::int64_t c = 0; c < chunks; ++c) {
    Rng rng(seed_stream(seed, {static_cast<std::uint64_t>(c)}));
    hits += simulate_chunk(q, chunk_trials(c, trials), rng);
  }
  return finish(hits, trials);
}

MonteCarloEstimate coverage_monte_carlo(const CoverageQuery& q, std::int64_t trials,
                                        std::uint64_t seed) {
  q.validate();
  if (trials < 1) throw ParameterDomainError("trials must be positive");
  const std::int64_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::int64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t c = 0; c < chunks; ++c) {
    Rng rng(seed_stream(seed, {static_cast<std::uint64_t>(c)}));
    hits += simulate_chunk(q, chunk_trials(c, trials), rng);
  }
  return finish(hits, trials);
}

double per_pose_regret(const Trajectory& trajectory, const PoseModel& model, std::size_t pose) {
  if (pose >= model.pose_count()) throw IndexError("pose index out of range");
  const GroundTruth& truth = model.truth(pose);
  const double best = truth.best();
  double regret = 0.0;
  for (const Step& s : trajectory.steps) {
    if (s.pose == pose) regret += best - truth.probs.at(s.arm);
  }
  return regret;
}

std::vector<double> cumulative_regret(const Trajectory& trajectory, const PoseModel& model) {
  std::vector<double> curve;
  curve.reserve(trajectory.steps.size());
  double running = 0.0;
  for (const Step& s : trajectory.steps) {
    const GroundTruth& truth = model.truth(s.pose);
    running += truth.best() - truth.probs.at(s.arm);
    curve.push_back(running);
  }
  return curve;
}

RegretLedger weighted_regret(std::span<const double> per_pose, std::span<const double> drop_probs,
                             std::span<const std::int64_t> pose_rounds) {
  if (per_pose.size() != drop_probs.size() || pose_rounds.size() != drop_probs.size()) {
    throw ShapeError("per-pose regret, drop probabilities and round counts differ in length");
  }
  RegretLedger ledger;
  ledger.per_pose_regret.assign(per_pose.begin(), per_pose.end());
  ledger.drop_probs.assign(drop_probs.begin(), drop_probs.end());
  ledger.pose_rounds.assign(pose_rounds.begin(), pose_rounds.end());
  for (std::size_t l = 0; l < per_pose.size(); ++l) {
    ledger.total += drop_probs[l] * per_pose[l];
    ledger.total_rounds += pose_rounds[l];
  }
  return ledger;
}

RegretLedger regret_ledger(const Trajectory& trajectory, const PoseModel& model) {
  const std::size_t poses = model.pose_count();
  std::vector<double> regrets(poses);
  std::vector<std::int64_t> rounds(poses, 0);
  for (std::size_t l = 0; l < poses; ++l) regrets[l] = per_pose_regret(trajectory, model, l);
  for (const Step& s : trajectory.steps) ++rounds.at(s.pose);
  return weighted_regret(regrets, model.drop_probs(), rounds);
}

RegretBound regret_bound(std::span<const double> drop_probs, std::size_t arm_count,
                         std::int64_t horizon, double constant) {
  if (arm_count == 0) throw EmptyArmSetError();
  RegretBound bound;
  const double t = static_cast<double>(horizon);
  const double k = static_cast<double>(arm_count);
  for (std::size_t l = 0; l < drop_probs.size(); ++l) {
    const double lambda = drop_probs[l];
    if (lambda <= 0.0) continue;
    const double rounds = t * lambda;
    if (rounds <= 1.0) {
      bound.excluded_poses.push_back(l);
      continue;
    }
    bound.value += constant * std::pow(lambda, 1.5) * std::sqrt(k * t * std::log(rounds));
  }
  return bound;
}

}  // namespace tsgrasp
