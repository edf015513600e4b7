#include "tsgrasp/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "tsgrasp/errors.hpp"

namespace tsgrasp {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

PolicySpec policy_from_json(const json& j) {
  PolicySpec p;
  if (j.is_string()) {
    p.kind = policy_kind_from_string(j.get<std::string>());
    return p;
  }
  reject_unknown(j, "policy", {"kind", "strength"});
  p.kind = policy_kind_from_string(j.at("kind").get<std::string>());
  read(j, "strength", p.strength);
  if (p.kind != PolicyKind::ThompsonSeeded && j.contains("strength")) {
    throw ConfigError("strength only applies to thompson_seeded");
  }
  return p;
}

TruthSpec truth_from_json(const json& j, TruthSpec spec) {
  reject_unknown(j, "environment.truth", {"family", "pool_size", "a", "b", "n_good", "q_hi", "q_lo", "spread"});
  read(j, "pool_size", spec.arm_count);
  const std::string family = j.value("family", std::string("sparse"));
  if (family == "beta") {
    BetaFamily beta;
    read(j, "a", beta.a);
    read(j, "b", beta.b);
    if (j.contains("n_good") || j.contains("q_hi") || j.contains("q_lo") || j.contains("spread")) {
      throw ConfigError("sparse-profile keys given for the beta family");
    }
    spec.family = beta;
  } else if (family == "sparse") {
    SparseProfile sparse = std::holds_alternative<SparseProfile>(spec.family)
                               ? std::get<SparseProfile>(spec.family)
                               : SparseProfile{};
    read(j, "n_good", sparse.n_good);
    read(j, "q_hi", sparse.q_hi);
    read(j, "q_lo", sparse.q_lo);
    read(j, "spread", sparse.spread);
    if (j.contains("a") || j.contains("b")) throw ConfigError("beta keys given for the sparse family");
    spec.family = sparse;
  } else {
    throw ConfigError("unknown truth family '" + family + "'");
  }
  return spec;
}

EnvironmentSpec environment_from_json(const json& j, EnvironmentSpec spec) {
  reject_unknown(j, "environment", {"truth", "pose_model", "mismatch_targets", "mismatch_bins",
                                    "mismatch_tolerance", "mismatch_sets", "prior_levels"});
  if (j.contains("truth")) spec.truth = truth_from_json(j.at("truth"), spec.truth);
  if (j.contains("pose_model")) spec.pose_model = pose_model_from_json(j.at("pose_model"));
  if (j.contains("mismatch_targets")) {
    spec.mismatch_targets = j.at("mismatch_targets").get<std::vector<double>>();
    if (!j.contains("mismatch_bins")) spec.mismatch_bins.clear();
  }
  if (j.contains("mismatch_bins")) {
    spec.mismatch_bins.clear();
    for (const auto& bin : j.at("mismatch_bins")) {
      const auto v = bin.get<std::vector<double>>();
      if (v.size() != 3) throw ConfigError("mismatch bin must be [lo, hi, weight]");
      spec.mismatch_bins.push_back({v[0], v[1], v[2]});
    }
    if (!j.contains("mismatch_targets")) spec.mismatch_targets.clear();
  }
  read(j, "mismatch_tolerance", spec.mismatch_tolerance);
  read(j, "mismatch_sets", spec.mismatch_sets);
  if (j.contains("prior_levels")) {
    const json& pl = j.at("prior_levels");
    if (pl.is_string()) {
      const auto kind = pl.get<std::string>();
      if (kind == "raw") {
        spec.prior_levels = {PriorLevels::Kind::Raw};
      } else if (kind == "truth") {
        spec.prior_levels = {PriorLevels::Kind::Truth};
      } else {
        throw ConfigError("prior_levels must be \"raw\", \"truth\" or {\"lo\", \"hi\"}");
      }
    } else {
      reject_unknown(pl, "environment.prior_levels", {"lo", "hi"});
      spec.prior_levels = {PriorLevels::Kind::Spaced, pl.at("lo").get<double>(), pl.at("hi").get<double>()};
    }
  }
  return spec;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c = ExperimentConfig::desk_defaults();
  try {
    reject_unknown(j, "config", {"arm_count", "horizon", "eval_every", "eval_samples", "policies",
                                 "environment", "environment_count", "arm_set_resamples",
                                 "runs_per_arm_set", "master_seed"});
    read(j, "arm_count", c.arm_count);
    read(j, "horizon", c.horizon);
    read(j, "eval_every", c.eval_every);
    read(j, "eval_samples", c.eval_samples);
    read(j, "environment_count", c.environment_count);
    read(j, "arm_set_resamples", c.arm_set_resamples);
    read(j, "runs_per_arm_set", c.runs_per_arm_set);
    read(j, "master_seed", c.master_seed);
    if (j.contains("policies")) {
      c.policies.clear();
      for (const auto& p : j.at("policies")) c.policies.push_back(policy_from_json(p));
    }
    if (j.contains("environment")) c.environment = environment_from_json(j.at("environment"), c.environment);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json policies = json::array();
  for (const auto& p : c.policies) {
    json pj = {{"kind", std::string(to_string(p.kind))}};
    if (p.kind == PolicyKind::ThompsonSeeded) pj["strength"] = p.strength;
    policies.push_back(pj);
  }
  const auto& e = c.environment;
  json truth;
  if (const auto* beta = std::get_if<BetaFamily>(&e.truth.family)) {
    truth = {{"family", "beta"}, {"a", beta->a}, {"b", beta->b}};
  } else {
    const auto& s = std::get<SparseProfile>(e.truth.family);
    truth = {{"family", "sparse"}, {"n_good", s.n_good}, {"q_hi", s.q_hi}, {"q_lo", s.q_lo}, {"spread", s.spread}};
  }
  truth["pool_size"] = e.truth.arm_count;
  json env = {{"truth", truth},
              {"mismatch_tolerance", e.mismatch_tolerance},
              {"mismatch_sets", e.mismatch_sets}};
  if (!e.mismatch_targets.empty()) env["mismatch_targets"] = e.mismatch_targets;
  if (!e.mismatch_bins.empty()) {
    json bins = json::array();
    for (const auto& b : e.mismatch_bins) bins.push_back({b.lo, b.hi, b.weight});
    env["mismatch_bins"] = bins;
  }
  if (e.pose_model) env["pose_model"] = *e.pose_model;
  switch (e.prior_levels.kind) {
    case PriorLevels::Kind::Raw: env["prior_levels"] = "raw"; break;
    case PriorLevels::Kind::Truth: env["prior_levels"] = "truth"; break;
    case PriorLevels::Kind::Spaced:
      env["prior_levels"] = {{"lo", e.prior_levels.lo}, {"hi", e.prior_levels.hi}};
      break;
  }
  return {{"arm_count", c.arm_count},
          {"horizon", c.horizon},
          {"eval_every", c.eval_every},
          {"eval_samples", c.eval_samples},
          {"policies", policies},
          {"environment", env},
          {"environment_count", c.environment_count},
          {"arm_set_resamples", c.arm_set_resamples},
          {"runs_per_arm_set", c.runs_per_arm_set},
          {"master_seed", c.master_seed}};
}

}  // namespace tsgrasp
