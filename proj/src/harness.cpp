#include "tsgrasp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <omp.h>

#include <boost/math/distributions/students_t.hpp>

#include "tsgrasp/analysis.hpp"
#include "tsgrasp/errors.hpp"

namespace tsgrasp {

namespace {

const std::uint64_t kEnvTag = label_tag("env");
const std::uint64_t kTargetTag = label_tag("target");
const std::uint64_t kArmSetTag = label_tag("arm_set");
const std::uint64_t kLearnTag = label_tag("learn");
const std::uint64_t kEvalTag = label_tag("eval");

int thread_count(int requested) { return requested <= 0 ? omp_get_max_threads() : requested; }

// One generated environment: a pool of arms with a calibrated prior, or the
// configured pose model with one calibrated prior per pose.
struct Environment {
  EnvironmentInfo info;
  GroundTruth pool_truth;
  std::vector<double> pool_prior;
  std::vector<std::vector<double>> pose_priors;
};

struct ArmSet {
  PoseModel model;
  std::vector<std::vector<double>> priors;  // per pose
  double mismatch = 0.0;
};

double draw_target(const EnvironmentSpec& spec, std::size_t env, std::uint64_t master) {
  if (!spec.mismatch_targets.empty()) return spec.mismatch_targets[env % spec.mismatch_targets.size()];
  Rng rng(seed_stream(master, {kEnvTag, env, kTargetTag}));
  double total = 0.0;
  for (const auto& bin : spec.mismatch_bins) total += bin.weight;
  double u = uniform01(rng) * total;
  for (const auto& bin : spec.mismatch_bins) {
    if (u < bin.weight) return bin.lo + (bin.hi - bin.lo) * uniform01(rng);
    u -= bin.weight;
  }
  const auto& last = spec.mismatch_bins.back();
  return last.lo + (last.hi - last.lo) * uniform01(rng);
}

Environment make_environment(const ExperimentConfig& config, std::size_t env) {
  const EnvironmentSpec& spec = config.environment;
  Rng rng(seed_stream(config.master_seed, {kEnvTag, env}));
  Environment out;
  out.info.env_id = env;
  out.info.target_mismatch = draw_target(spec, env, config.master_seed);
  if (spec.pose_model) {
    const PoseModel& model = *spec.pose_model;
    double weighted = 0.0;
    for (std::size_t i = 0; i < model.pose_count(); ++i) {
      const auto synth = synthesize_prior(model.truth(i), out.info.target_mismatch,
                                          spec.mismatch_tolerance, {0, 1}, rng);
      out.pose_priors.push_back(spec.prior_levels.apply(synth.qualities, model.truth(i).probs));
      weighted += model.drop_probs()[i] * synth.achieved_mismatch;
    }
    out.info.achieved_mismatch = weighted;
    return out;
  }
  TruthSpec truth_spec = spec.truth;
  truth_spec.arm_count = std::max(spec.truth.arm_count, config.arm_count);
  out.pool_truth = generate_ground_truth(truth_spec, rng);
  const std::size_t subset = truth_spec.arm_count == config.arm_count ? 0 : config.arm_count;
  const auto synth = synthesize_prior(out.pool_truth, out.info.target_mismatch,
                                      spec.mismatch_tolerance, {subset, spec.mismatch_sets}, rng);
  out.pool_prior = spec.prior_levels.apply(synth.qualities, out.pool_truth.probs);
  out.info.achieved_mismatch = synth.achieved_mismatch;
  out.info.sigma = synth.sigma;
  out.info.reversed = synth.reversed;
  return out;
}

ArmSet make_arm_set(const ExperimentConfig& config, const Environment& env, std::size_t arm_set) {
  const EnvironmentSpec& spec = config.environment;
  if (spec.pose_model) {
    return ArmSet{*spec.pose_model, env.pose_priors, env.info.achieved_mismatch};
  }
  const std::size_t pool = env.pool_truth.arm_count();
  Rng rng(seed_stream(config.master_seed, {kArmSetTag, env.info.env_id, arm_set}));
  std::vector<std::size_t> index(pool);
  for (int attempt = 0; attempt < kTruthRetries; ++attempt) {
    std::iota(index.begin(), index.end(), std::size_t{0});
    if (pool > config.arm_count) {
      for (std::size_t i = 0; i < config.arm_count; ++i) {
        std::swap(index[i], index[i + uniform_index(pool - i, rng)]);
      }
    }
    std::vector<double> truth(config.arm_count);
    std::vector<double> prior(config.arm_count);
    for (std::size_t k = 0; k < config.arm_count; ++k) {
      truth[k] = env.pool_truth.probs[index[k]];
      prior[k] = env.pool_prior[index[k]];
    }
    if (std::none_of(truth.begin(), truth.end(), [](double p) { return p > 0.0; })) continue;
    double mismatch = env.info.achieved_mismatch;
    if (truth.size() >= 2) {
      try {
        mismatch = kendall_tau(prior, truth).mismatch;
      } catch (const DegenerateRankingError&) {
      }
    }
    return ArmSet{PoseModel::single(GroundTruth(std::move(truth))), {std::move(prior)}, mismatch};
  }
  throw GenerationError("no arm set with a positive arm after " + std::to_string(kTruthRetries) +
                        " draws");
}

std::vector<BeliefState> initial_beliefs(const PolicySpec& policy, const PoseModel& model,
                                         const std::vector<std::vector<double>>& priors) {
  std::vector<BeliefState> beliefs;
  for (std::size_t i = 0; i < model.pose_count(); ++i) {
    if (policy.kind == PolicyKind::ThompsonSeeded) {
      beliefs.push_back(seed_beliefs(PriorEstimate(priors[i], policy.strength)));
    } else {
      beliefs.push_back(BeliefState::uniform(model.truth(i).arm_count()));
    }
  }
  return beliefs;
}

struct Job {
  std::size_t policy = 0;
  std::size_t env_slot = 0;  // index into the generated environments
  std::size_t arm_set = 0;
  std::size_t run = 0;
};

RunRecord run_job(const ExperimentConfig& config, const Job& job,
                  const std::vector<Environment>& envs,
                  const std::vector<std::vector<ArmSet>>& arm_sets) {
  const PolicySpec& policy = config.policies[job.policy];
  const Environment& env = envs[job.env_slot];
  const ArmSet& set = arm_sets[job.env_slot][job.arm_set];
  const std::uint64_t policy_tag = label_tag(policy.id());
  const std::size_t env_id = env.info.env_id;

  RunRecord rec;
  rec.policy = policy.id();
  rec.policy_index = job.policy;
  rec.env_id = env_id;
  rec.arm_set_id = job.arm_set;
  rec.run_id = job.run;
  rec.mismatch = set.mismatch;
  rec.seed = seed_stream(config.master_seed,
                         {kEnvTag, env_id, job.arm_set, policy_tag, job.run, kLearnTag});
  Rng learn(rec.seed);
  Rng eval(seed_stream(config.master_seed,
                       {kEnvTag, env_id, job.arm_set, policy_tag, job.run, kEvalTag}));

  Episode episode(set.model, policy.kind, initial_beliefs(policy, set.model, set.priors), set.priors,
                  learn);
  rec.eval_curve.reserve(config.eval_points());
  for (std::int64_t step = 0; step <= config.horizon; ++step) {
    if (step % config.eval_every == 0) {
      rec.eval_curve.push_back(evaluate_episode(set.model, episode, config.eval_samples, eval));
    }
    if (step < config.horizon) episode.step(learn);
  }
  rec.sum_reward = std::accumulate(rec.eval_curve.begin(), rec.eval_curve.end(), 0.0);
  rec.scaled_sum = rec.sum_reward * 100.0 / static_cast<double>(rec.eval_curve.size());
  return rec;
}

}  // namespace

std::vector<double> PriorLevels::apply(std::span<const double> prior,
                                       std::span<const double> truth) const {
  switch (kind) {
    case Kind::Raw: return {prior.begin(), prior.end()};
    case Kind::Truth: return rank_matched(prior, truth);
    case Kind::Spaced: return rank_spaced(prior, lo, hi);
  }
  return {prior.begin(), prior.end()};
}

std::string PolicySpec::id() const {
  switch (kind) {
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::ThompsonUniform: return "ts_uniform";
    case PolicyKind::ThompsonSeeded: break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "tslp_s%g", strength);
  return buf;
}

ExperimentConfig ExperimentConfig::desk_defaults() {
  ExperimentConfig c;
  c.policies = {{PolicyKind::Oracle, 0.0},
                {PolicyKind::ThompsonSeeded, 5.0},
                {PolicyKind::ThompsonUniform, 0.0},
                {PolicyKind::Greedy, 0.0}};
  c.environment.truth.arm_count = 20;
  c.environment.prior_levels.kind = PriorLevels::Kind::Truth;
  c.environment.truth.family = SparseProfile{1, 0.9, 0.05, 0.05};
  // Mismatch spread over 0.16..0.64 with the 0.40-0.45 bin most common.
  c.environment.mismatch_bins = {{0.15, 0.20, 0.04}, {0.20, 0.25, 0.08}, {0.25, 0.30, 0.10},
                                 {0.30, 0.35, 0.13}, {0.35, 0.40, 0.18}, {0.40, 0.45, 0.25},
                                 {0.45, 0.50, 0.12}, {0.50, 0.55, 0.06}, {0.55, 0.65, 0.04}};
  return c;
}

void ExperimentConfig::validate() const {
  if (arm_count < 1) throw ConfigError("arm_count must be at least 1");
  if (horizon < 0) throw ConfigError("horizon must be non-negative");
  if (eval_every < 1) throw ConfigError("eval_every must be at least 1");
  if (eval_samples < 1) throw ConfigError("eval_samples must be at least 1");
  if (policies.empty()) throw ConfigError("at least one policy is required");
  for (const auto& p : policies) {
    if (p.kind == PolicyKind::ThompsonSeeded && !(p.strength > 0.0)) {
      throw ConfigError("thompson_seeded needs a positive strength");
    }
  }
  std::vector<std::string> ids;
  for (const auto& p : policies) ids.push_back(p.id());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ConfigError("duplicate policy in config");
  }
  if (environment_count < 1 || arm_set_resamples < 1 || runs_per_arm_set < 1) {
    throw ConfigError("environment_count, arm_set_resamples and runs_per_arm_set must be >= 1");
  }
  const auto& env = environment;
  if (env.mismatch_targets.empty() && env.mismatch_bins.empty()) {
    throw ConfigError("environment needs mismatch_targets or mismatch_bins");
  }
  for (const double t : env.mismatch_targets) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("mismatch target outside [0, 1]");
  }
  double weight = 0.0;
  for (const auto& b : env.mismatch_bins) {
    if (!(b.lo >= 0.0 && b.lo <= b.hi && b.hi <= 1.0 && b.weight >= 0.0)) {
      throw ConfigError("mismatch bin must satisfy 0 <= lo <= hi <= 1 and weight >= 0");
    }
    weight += b.weight;
  }
  if (env.mismatch_targets.empty() && !(weight > 0.0)) {
    throw ConfigError("mismatch bins carry no weight");
  }
  if (!(env.mismatch_tolerance > 0.0)) throw ConfigError("mismatch_tolerance must be positive");
  if (env.mismatch_sets < 1) throw ConfigError("mismatch_sets must be at least 1");
  if (env.prior_levels.kind == PriorLevels::Kind::Spaced) {
    const auto& pl = env.prior_levels;
    if (!(pl.lo >= 0.0 && pl.lo <= pl.hi && pl.hi <= 1.0)) {
      throw ConfigError("spaced prior levels need 0 <= lo <= hi <= 1");
    }
  }
  if (!env.pose_model) {
    if (std::max(env.truth.arm_count, arm_count) < 2) {
      throw ConfigError("single-pose environments need at least two arms");
    }
  }
}

double evaluate_policy(PolicyKind kind, const BeliefState& belief, std::span<const double> prior_q,
                       const GroundTruth& truth, std::size_t eval_samples, Rng& rng) {
  if (eval_samples == 0) throw ParameterDomainError("eval_samples must be positive");
  std::size_t successes = 0;
  for (std::size_t s = 0; s < eval_samples; ++s) {
    const std::size_t arm = select_arm(kind, belief, prior_q, truth, rng);
    successes += static_cast<std::size_t>(sample_reward(truth.probs[arm], rng));
  }
  return static_cast<double>(successes) / static_cast<double>(eval_samples);
}

double evaluate_episode(const PoseModel& model, const Episode& episode, std::size_t eval_samples,
                        Rng& rng) {
  if (model.pose_count() == 1) {
    return evaluate_policy(episode.policy(), episode.beliefs()[0], episode.priors()[0],
                           model.truth(0), eval_samples, rng);
  }
  if (eval_samples == 0) throw ParameterDomainError("eval_samples must be positive");
  std::size_t successes = 0;
  for (std::size_t s = 0; s < eval_samples; ++s) {
    const std::size_t pose = drop(model, rng);
    const GroundTruth& truth = model.truth(pose);
    const std::size_t arm = select_arm(episode.policy(), episode.beliefs()[pose],
                                       episode.priors()[pose], truth, rng);
    successes += static_cast<std::size_t>(sample_reward(truth.probs[arm], rng));
  }
  return static_cast<double>(successes) / static_cast<double>(eval_samples);
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  const int n_threads = thread_count(threads);
  const std::size_t n_env = config.environment_count;

  // Environments: generation failures are recorded, not fatal.
  std::vector<std::optional<Environment>> generated(n_env);
  std::vector<std::string> failure(n_env);
  auto generate = [&](std::size_t e) {
    try {
      generated[e] = make_environment(config, e);
    } catch (const GenerationError& ex) {
      failure[e] = ex.what();
    } catch (const CalibrationError& ex) {
      failure[e] = ex.what();
    } catch (const DegenerateRankingError& ex) {
      failure[e] = ex.what();
    }
  };
  if (n_threads == 1) {
    for (std::size_t e = 0; e < n_env; ++e) generate(e);
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (std::size_t e = 0; e < n_env; ++e) generate(e);
  }

  ExperimentResult result;
  std::vector<Environment> envs;
  std::vector<std::vector<ArmSet>> arm_sets;
  for (std::size_t e = 0; e < n_env; ++e) {
    if (!generated[e]) {
      result.skipped.push_back({e, failure[e]});
      continue;
    }
    std::vector<ArmSet> sets;
    try {
      for (std::size_t a = 0; a < config.arm_set_resamples; ++a) {
        sets.push_back(make_arm_set(config, *generated[e], a));
      }
    } catch (const GenerationError& ex) {
      result.skipped.push_back({e, ex.what()});
      continue;
    }
    result.environments.push_back(generated[e]->info);
    envs.push_back(std::move(*generated[e]));
    arm_sets.push_back(std::move(sets));
  }

  std::vector<Job> jobs;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    for (std::size_t e = 0; e < envs.size(); ++e) {
      for (std::size_t a = 0; a < config.arm_set_resamples; ++a) {
        for (std::size_t r = 0; r < config.runs_per_arm_set; ++r) jobs.push_back({p, e, a, r});
      }
    }
  }

  result.records.resize(jobs.size());
  if (n_threads == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      result.records[j] = run_job(config, jobs[j], envs, arm_sets);
    }
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      result.records[j] = run_job(config, jobs[j], envs, arm_sets);
    }
  }
  return result;
}

Stats describe(std::span<const double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.stddev_defined = true;
  }
  return s;
}

int mismatch_bin(double mismatch) {
  const int last = static_cast<int>(std::lround(1.0 / kMismatchBinWidth)) - 1;
  // The small offset keeps exact multiples such as 0.3 in the bin they start.
  const int bin = static_cast<int>(std::floor(mismatch / kMismatchBinWidth + 1e-9));
  return std::clamp(bin, 0, last);
}

SummaryTable aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyAggregationError();
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> overall;
  std::map<std::string, std::map<int, std::vector<double>>> binned;
  for (const auto& r : records) {
    if (!overall.contains(r.policy)) order.push_back(r.policy);
    overall[r.policy].push_back(r.scaled_sum);
    binned[r.policy][mismatch_bin(r.mismatch)].push_back(r.scaled_sum);
  }
  SummaryTable table;
  for (const auto& policy : order) {
    PolicySummary ps;
    ps.policy = policy;
    ps.overall = describe(overall[policy]);
    for (const auto& [bin, values] : binned[policy]) ps.bins[bin] = describe(values);
    table.policies.push_back(std::move(ps));
  }
  return table;
}

RegretStudy regret_study(const PoseModel& model, const PolicySpec& policy,
                         const std::vector<std::vector<double>>& prior_q, std::int64_t horizon,
                         std::size_t seeds, std::uint64_t master_seed, int threads) {
  if (seeds == 0) throw ParameterDomainError("seeds must be positive");
  const int n_threads = thread_count(threads);
  const std::uint64_t policy_tag = label_tag(policy.id());
  std::vector<std::vector<double>> curves(seeds);
  auto one = [&](std::size_t s) {
    auto beliefs = initial_beliefs(policy, model, prior_q);
    const auto traj = run_episode(model, policy.kind, beliefs, prior_q, horizon,
                                  seed_stream(master_seed, {policy_tag, s}));
    curves[s] = cumulative_regret(traj, model);
  };
  if (n_threads == 1) {
    for (std::size_t s = 0; s < seeds; ++s) one(s);
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (std::size_t s = 0; s < seeds; ++s) one(s);
  }
  RegretStudy study;
  study.seeds = seeds;
  const auto steps = static_cast<std::size_t>(horizon);
  study.mean.resize(steps);
  study.stddev.resize(steps);
  std::vector<double> column(seeds);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t s = 0; s < seeds; ++s) column[s] = curves[s][t];
    const Stats st = describe(column);
    study.mean[t] = st.mean;
    study.stddev[t] = st.stddev;
  }
  return study;
}

double welch_one_sided_p(std::span<const double> a, std::span<const double> b) {
  const Stats sa = describe(a);
  const Stats sb = describe(b);
  if (sa.count < 2 || sb.count < 2) throw ParameterDomainError("Welch test needs two values per group");
  const double va = sa.stddev * sa.stddev / static_cast<double>(sa.count);
  const double vb = sb.stddev * sb.stddev / static_cast<double>(sb.count);
  const double se = std::sqrt(va + vb);
  if (se == 0.0) return sa.mean > sb.mean ? 0.0 : 1.0;
  const double t = (sa.mean - sb.mean) / se;
  const double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(sa.count - 1) +
                     vb * vb / static_cast<double>(sb.count - 1));
  const boost::math::students_t dist(df);
  return boost::math::cdf(boost::math::complement(dist, t));
}

}  // namespace tsgrasp
