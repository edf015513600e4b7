// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: tsgrasp_acceptance <path to tsgrasp CLI> <desk config>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "tsgrasp/analysis.hpp"
#include "tsgrasp/config.hpp"
#include "tsgrasp/errors.hpp"
#include "tsgrasp/harness.hpp"
#include "tsgrasp/prior.hpp"
#include "tsgrasp/verify.hpp"

using namespace tsgrasp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome formula_equivalence() {
  const auto r = check_formula_equivalence(CoverageGrid::standard());
  return {r.points == 7000 && r.max_relative_error <= 1e-9 && r.seconds < 10.0,
          fmt("%zu points, max rel err %.3g, %.2f s", r.points, r.max_relative_error, r.seconds)};
}

Outcome miss_identity() {
  const auto r = check_miss_identity(CoverageGrid::standard());
  return {r.max_relative_error <= 1e-9,
          fmt("%zu points, max rel err %.3g", r.points, r.max_relative_error)};
}

Outcome monte_carlo() {
  const auto r = check_monte_carlo_agreement(standard_monte_carlo_points(), 200000, 20200501);
  return {r.points.size() == 20 && r.within >= 19 && r.seconds < 30.0,
          fmt("%zu/%zu within 3 SE, %.2f s", r.within, r.points.size(), r.seconds)};
}

// Stay dynamics with every pose succeeding w.p. 0.6 under Oracle, so the
// complement success probability is 0.6 for every pose.
Outcome simulator_consistency() {
  const std::vector<double> lambda{0.5, 0.3, 0.2};
  const double eta = 0.6;
  const GroundTruth t({eta});
  const PoseModel model(lambda, {t, t, t});
  const int episodes = 100000;
  const std::vector<std::int64_t> horizons{1, 5, 20};
  std::vector<std::vector<double>> hits(3, std::vector<double>(horizons.size(), 0.0));
  for (int e = 0; e < episodes; ++e) {
    std::vector<BeliefState> beliefs(3, BeliefState::uniform(1));
    const auto traj = run_episode(model, PolicyKind::Oracle, beliefs, {}, horizons.back(),
                                  seed_stream(4, {static_cast<std::uint64_t>(e)}));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t h = 0; h < horizons.size(); ++h) {
        if (traj.first_hit[i] && *traj.first_hit[i] <= horizons[h]) hits[i][h] += 1.0;
      }
    }
  }
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      const double p = coverage_closed_form({lambda[i], eta, horizons[h]});
      const double se = std::sqrt(p * (1.0 - p) / episodes);
      const double z = std::abs(hits[i][h] / episodes - p) / se;
      worst = std::max(worst, z);
      ok = ok && z <= 3.0;
    }
  }
  return {ok, fmt("9 (pose, T) cells, worst |z| = %.2f", worst)};
}

Outcome posterior_correctness() {
  Rng rng(5);
  const int trajectories = 10000;
  int bad = 0;
  for (int n = 0; n < trajectories; ++n) {
    const std::size_t k = 1 + uniform_index(10, rng);
    std::vector<double> probs(k);
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) {
      probs[i] = uniform01(rng);
      q[i] = uniform01(rng);
    }
    probs[0] = std::max(probs[0], 0.01);
    const auto model = PoseModel::single(GroundTruth(probs));
    const auto initial = seed_beliefs(PriorEstimate(q, 0.5 + 20.0 * uniform01(rng)));
    std::vector<BeliefState> beliefs{initial};
    const auto horizon = static_cast<std::int64_t>(uniform_index(200, rng));
    const auto traj = run_episode(model, PolicyKind::ThompsonSeeded, beliefs, {}, horizon, rng());
    std::vector<double> wins(k, 0.0);
    std::vector<double> losses(k, 0.0);
    for (const auto& s : traj.steps) (s.reward ? wins : losses)[s.arm] += 1.0;
    BeliefState replay = initial;
    for (const auto& s : traj.steps) replay.update(s.arm, s.reward);
    bool ok = replay == beliefs[0];
    ok = ok && std::abs(beliefs[0].total_pseudo_count() -
                        (initial.total_pseudo_count() + static_cast<double>(horizon))) <= 1e-9;
    for (std::size_t i = 0; i < k; ++i) {
      ok = ok && std::abs((beliefs[0].alpha(i) - initial.alpha(i)) - wins[i]) <= 1e-9;
      ok = ok && std::abs((beliefs[0].beta(i) - initial.beta(i)) - losses[i]) <= 1e-9;
    }
    if (!ok) ++bad;
  }
  return {bad == 0, fmt("%d trajectories, %d violations", trajectories, bad)};
}

Outcome mismatch_metric() {
  Rng rng(6);
  int mismatched = 0;
  std::size_t largest = 0;
  for (int n = 0; n < 200; ++n) {
    const std::size_t k = n == 0 ? 500 : 2 + uniform_index(499, rng);
    largest = std::max(largest, k);
    const int levels = n % 4 == 0 ? 7 : 0;
    std::vector<double> a(k);
    std::vector<double> b(k);
    for (std::size_t i = 0; i < k; ++i) {
      a[i] = levels ? static_cast<double>(uniform_index(levels, rng)) : uniform01(rng);
      b[i] = levels ? static_cast<double>(uniform_index(levels, rng)) : uniform01(rng);
    }
    std::int64_t nc = 0, nd = 0, ta = 0, tb = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double da = a[i] - a[j];
        const double db = b[i] - b[j];
        if (da == 0 && db == 0) continue;
        if (da == 0) ++ta;
        else if (db == 0) ++tb;
        else if ((da > 0) == (db > 0)) ++nc;
        else ++nd;
      }
    }
    const double expected = static_cast<double>(nc - nd) /
                            std::sqrt(static_cast<double>(nc + nd + ta) * static_cast<double>(nc + nd + tb));
    const auto r = kendall_tau(a, b);
    if (r.tau != expected || r.concordant != nc || r.discordant != nd) ++mismatched;
    if (!levels) {
      std::vector<double> reversed(a.size());
      std::transform(a.begin(), a.end(), reversed.begin(), [](double x) { return 1.0 - x; });
      if (kendall_tau(a, a).mismatch != 0.0 || kendall_tau(a, reversed).mismatch != 1.0) ++mismatched;
    }
  }
  return {mismatched == 0, fmt("200 pairs up to K=%zu, %d disagreements", largest, mismatched)};
}

std::vector<double> scaled_sums(const ExperimentResult& result, const std::string& policy,
                                double lo, double hi) {
  std::vector<double> out;
  for (const auto& r : result.records) {
    if (r.policy == policy && r.mismatch >= lo && r.mismatch <= hi) out.push_back(r.scaled_sum);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? NAN : s / static_cast<double>(v.size());
}

// One-sided Jonckheere-Terpstra test for a decreasing trend across ordered
// groups, normal approximation with the no-ties variance (conservative when
// ties are present).
double decreasing_trend_p(const std::vector<std::vector<double>>& groups) {
  double stat = 0.0;
  double n_total = 0.0;
  double sum_sq = 0.0;
  double sum_cube = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double n = static_cast<double>(groups[i].size());
    n_total += n;
    sum_sq += n * n;
    sum_cube += n * n * (2.0 * n + 3.0);
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      for (const double x : groups[i]) {
        for (const double y : groups[j]) stat += x > y ? 1.0 : x == y ? 0.5 : 0.0;
      }
    }
  }
  const double mean = (n_total * n_total - sum_sq) / 4.0;
  const double var = (n_total * n_total * (2.0 * n_total + 3.0) - sum_cube) / 72.0;
  const double z = (stat - mean) / std::sqrt(var);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

ExperimentResult desk_sweep(const fs::path& config_path) {
  auto config = load_config(config_path);
  std::vector<PolicySpec> policies;
  for (const auto& p : config.policies) {
    if (p.kind != PolicyKind::ThompsonSeeded) policies.push_back(p);
  }
  for (const double s : {5.0, 10.0, 50.0, 100.0}) policies.push_back({PolicyKind::ThompsonSeeded, s});
  config.policies = policies;
  return run_experiment(config, 0);
}

Outcome policy_ordering(const ExperimentResult& result) {
  const std::vector<std::string> order{"oracle", "tslp_s5", "ts_uniform", "greedy"};
  std::vector<std::vector<double>> high;
  std::string detail = "high M:";
  for (const auto& p : order) {
    high.push_back(scaled_sums(result, p, 0.4, 1.0));
    detail += fmt(" %s %.2f (n=%zu)", p.c_str(), mean_of(high.back()), high.back().size());
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double gap = mean_of(high[i]) - mean_of(high[i + 1]);
    const double p = welch_one_sided_p(high[i], high[i + 1]);
    ok = ok && gap >= 2.0 && p < 0.01;
    detail += fmt("; gap %.2f p=%.2g", gap, p);
  }
  const double oracle_low = mean_of(scaled_sums(result, "oracle", 0.0, 0.25));
  const double greedy_low = mean_of(scaled_sums(result, "greedy", 0.0, 0.25));
  ok = ok && std::abs(oracle_low - greedy_low) <= 5.0;
  detail += fmt("; low M: oracle %.2f greedy %.2f", oracle_low, greedy_low);
  return {ok, detail};
}

Outcome strength_trend(const ExperimentResult& result) {
  std::vector<std::vector<double>> groups;
  std::string detail = "high M means:";
  bool ok = true;
  for (const char* id : {"tslp_s5", "tslp_s10", "tslp_s50", "tslp_s100"}) {
    groups.push_back(scaled_sums(result, id, 0.4, 1.0));
    detail += fmt(" %s %.2f", id, mean_of(groups.back()));
    if (groups.size() > 1) ok = ok && mean_of(groups.back()) <= mean_of(groups[groups.size() - 2]);
  }
  const double p = decreasing_trend_p(groups);
  ok = ok && p < 0.01;
  detail += fmt("; decreasing-trend rank test p=%.2g", p);
  return {ok, detail};
}

// Seeded Thompson sampling at S = 5 on one fixed K = 20 environment with
// Beta(2, 5) arm qualities and a prior calibrated to mismatch 0.4. The small
// gaps between arms keep regret growing over the whole horizon; a single
// 0.9 arm among 0.05 arms would be found within a few dozen rounds.
Outcome regret_sublinearity() {
  const std::size_t k = 20;
  Rng rng(seed_stream(9, {1}));
  const auto truth = generate_ground_truth({k, BetaFamily{2.0, 5.0}}, rng);
  const auto synthesis = synthesize_prior(truth, 0.4, 0.02, {}, rng);
  const auto& prior = synthesis.qualities;
  const auto model = PoseModel::single(truth);
  const auto study = regret_study(model, {PolicyKind::ThompsonSeeded, 5.0}, {prior}, 2000, 50, 9, 0);
  auto r = [&](std::size_t t) { return study.mean[t - 1]; };
  bool ok = true;
  std::string detail;
  for (const std::size_t t : {250, 500, 1000}) {
    const double ratio = r(2 * t) / r(t);
    ok = ok && ratio < 1.9;
    detail += fmt("R(%zu)/R(%zu)=%.3f; ", 2 * t, t, ratio);
  }
  const auto scale = [&](double t) { return std::sqrt(static_cast<double>(k) * t * std::log(t)); };
  const double c = r(500) / scale(500.0);
  const double limit = 1.25 * c * scale(2000.0);
  ok = ok && r(2000) <= limit;
  detail += fmt("c=%.4f, R(2000)=%.2f <= %.2f (prior M %.3f)", c, r(2000), limit,
                synthesis.achieved_mismatch);
  return {ok, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs `simulate` serially and with eight threads (more than the cores of
// small machines, so scheduling really interleaves) and compares CSV bytes.
Outcome reproducibility(const std::string& cli, const fs::path& config) {
  const fs::path root = fs::temp_directory_path() / "tsgrasp_acceptance_repro";
  fs::remove_all(root);
  std::vector<std::string> dirs;
  for (const char* threads : {"1", "8"}) {
    const fs::path out = root / (std::string("threads_") + threads);
    const std::string cmd = "\"" + cli + "\" simulate \"" + config.string() + "\" --out \"" +
                            out.string() + "\" --force --threads " + threads + " > /dev/null";
    const int status = std::system(cmd.c_str());
    if (status != 0) return {false, fmt("simulate --threads %s exited with status %d", threads, status)};
    dirs.push_back(out.string());
  }
  std::string detail;
  bool ok = true;
  for (const char* name : {"records.csv", "curves.csv", "summary.csv"}) {
    const auto a = slurp(fs::path(dirs[0]) / name);
    const auto b = slurp(fs::path(dirs[1]) / name);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += fmt("%s %s (%zu bytes); ", name, same ? "identical" : "DIFFERS", a.size());
  }
  fs::remove_all(root);
  return {ok, detail + "serial vs 8 threads"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <tsgrasp cli> <desk config>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path config = argv[2];

  report(1, "coverage formula equivalence", formula_equivalence);
  report(2, "miss probability identity", miss_identity);
  report(3, "Monte-Carlo agreement", monte_carlo);
  report(4, "full-simulator coverage consistency", simulator_consistency);
  report(5, "posterior bookkeeping", posterior_correctness);
  report(6, "mismatch metric", mismatch_metric);

  ExperimentResult sweep;
  std::string sweep_error;
  const auto start = std::chrono::steady_clock::now();
  try {
    sweep = desk_sweep(config);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  std::printf("info desk sweep: %zu records, %zu skipped environments, %.1f s\n", sweep.records.size(),
              sweep.skipped.size(), seconds_since(start));
  const auto needs_sweep = [&](auto check) {
    return [&, check]() -> Outcome {
      if (!sweep_error.empty()) return {false, "desk sweep failed: " + sweep_error};
      return check(sweep);
    };
  };
  report(7, "policy ordering", needs_sweep(policy_ordering));
  report(8, "prior-strength trend", needs_sweep(strength_trend));
  report(9, "regret sublinearity", regret_sublinearity);
  report(10, "serial/parallel reproducibility", [&] { return reproducibility(cli, config); });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
