// Command-line front end: experiments, coverage tables, mismatch of quality
// files and the analysis verification suite.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsgrasp/analysis.hpp"
#include "tsgrasp/config.hpp"
#include "tsgrasp/errors.hpp"
#include "tsgrasp/output.hpp"
#include "tsgrasp/prior.hpp"
#include "tsgrasp/verify.hpp"

namespace fs = std::filesystem;
using namespace tsgrasp;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kGenerationExhausted = 2, kVerifyFailed = 3 };

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  int threads = 0;
};

fs::path resolve_output(const RunOptions& opt) {
  if (!opt.out_dir.empty()) {
    const fs::path dir(opt.out_dir);
    if (fs::exists(dir) && !fs::is_empty(dir) && !opt.force) {
      throw ConfigError("output directory " + dir.string() + " exists; pass --force to overwrite");
    }
    return dir;
  }
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&now));
  fs::path dir = fs::path("runs") / stamp;
  for (int n = 1; fs::exists(dir); ++n) dir = fs::path("runs") / (std::string(stamp) + "-" + std::to_string(n));
  return dir;
}

int run_and_write(const ExperimentConfig& config, const RunOptions& opt) {
  const fs::path out = resolve_output(opt);
  const auto result = run_experiment(config, opt.threads);
  for (const auto& s : result.skipped) {
    std::cerr << "skipped environment " << s.env_id << ": " << s.reason << '\n';
  }
  if (result.environments.empty()) {
    std::cerr << "every environment failed to generate\n";
    return kGenerationExhausted;
  }
  write_results(out, config, result);
  const auto table = aggregate(result.records);
  std::cout << "policy,runs,mean_scaled_sum,std_scaled_sum\n";
  for (const auto& p : table.policies) {
    std::cout << p.policy << ',' << p.overall.count << ',' << format_number(p.overall.mean) << ','
              << format_number(p.overall.stddev) << '\n';
  }
  std::cerr << "wrote " << out.string() << '\n';
  return kOk;
}

std::vector<double> parse_strengths(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("bad strength '" + item + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int run_coverage(const std::vector<double>& lambdas, const std::vector<double>& etas,
                 const std::vector<std::int64_t>& horizons, std::int64_t trials, std::uint64_t seed) {
  std::cout << "lambda,eta,T,p_double_sum,p_closed_form,p_monte_carlo,mc_stderr\n";
  std::uint64_t row = 0;
  for (const double lambda : lambdas) {
    for (const double eta : etas) {
      for (const std::int64_t t : horizons) {
        const CoverageQuery q{lambda, eta, t};
        const auto mc = coverage_monte_carlo(q, trials, seed_stream(seed, {row++}));
        std::cout << format_number(lambda) << ',' << format_number(eta) << ',' << t << ','
                  << format_number(coverage_double_sum(q)) << ','
                  << format_number(coverage_closed_form(q)) << ',' << format_number(mc.estimate)
                  << ',' << format_number(mc.standard_error) << '\n';
      }
    }
  }
  return kOk;
}

int run_mismatch(const std::string& prior_csv, const std::string& truth_csv,
                 std::optional<std::size_t> subset, std::size_t sets, std::uint64_t seed) {
  const auto prior = read_quality_csv(prior_csv);
  const auto truth = read_quality_csv(truth_csv);
  if (prior.q_prior.empty()) throw ConfigError(prior_csv + ": no q_prior column");
  if (truth.q_truth.empty()) throw ConfigError(truth_csv + ": no q_truth column");
  if (prior.arm_ids != truth.arm_ids) throw ConfigError("prior and truth files list different arms");
  const auto report = kendall_tau(prior.q_prior, truth.q_truth);
  std::cout << "tau,mismatch,concordant,discordant,ties_prior,ties_truth";
  if (subset) std::cout << ",averaged_mismatch";
  std::cout << '\n'
            << format_number(report.tau) << ',' << format_number(report.mismatch) << ','
            << report.concordant << ',' << report.discordant << ',' << report.ties_prior << ','
            << report.ties_truth;
  if (subset) {
    Rng rng(seed);
    std::cout << ',' << format_number(averaged_mismatch(prior.q_prior, truth.q_truth, *subset, sets, rng));
  }
  std::cout << '\n';
  return kOk;
}

int run_verify(std::int64_t trials, std::uint64_t seed) {
  const auto grid = CoverageGrid::standard();
  const auto equivalence = check_formula_equivalence(grid);
  const auto miss = check_miss_identity(grid);
  const auto mc = check_monte_carlo_agreement(standard_monte_carlo_points(), trials, seed);

  const bool eq_ok = equivalence.max_relative_error <= 1e-9;
  const bool miss_ok = miss.max_relative_error <= 1e-9;
  const bool mc_ok = mc.within + 1 >= mc.points.size();
  std::printf("%s formula equivalence: %zu points, max relative error %.3e, %.2f s\n",
              eq_ok ? "PASS" : "FAIL", equivalence.points, equivalence.max_relative_error,
              equivalence.seconds);
  std::printf("%s miss-probability identity: %zu points, max relative error %.3e\n",
              miss_ok ? "PASS" : "FAIL", miss.points, miss.max_relative_error);
  std::printf("%s Monte-Carlo agreement: %zu/%zu points within 3 SE (%lld trials each), %.2f s\n",
              mc_ok ? "PASS" : "FAIL", mc.within, mc.points.size(), static_cast<long long>(trials),
              mc.seconds);
  return eq_ok && miss_ok && mc_ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thompson-sampling grasp exploration simulator"};
  app.require_subcommand(1);

  RunOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Run a full experiment from a JSON config");
  simulate->add_option("config", sim_opt.config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim_opt.out_dir, "Output directory (default runs/<timestamp>)");
  simulate->add_flag("--force", sim_opt.force, "Overwrite an existing output directory");
  simulate->add_option("--threads", sim_opt.threads, "Worker threads (0 = all, 1 = serial)");

  RunOptions sweep_opt;
  std::string strengths_text = "5,10,50,100";
  auto* sweep = app.add_subcommand("sweep", "Seeded Thompson sampling across prior strengths");
  sweep->add_option("--strengths", strengths_text, "Comma-separated prior strengths");
  sweep->add_option("config", sweep_opt.config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_opt.out_dir, "Output directory (default runs/<timestamp>)");
  sweep->add_flag("--force", sweep_opt.force, "Overwrite an existing output directory");
  sweep->add_option("--threads", sweep_opt.threads, "Worker threads (0 = all, 1 = serial)");

  std::vector<double> lambdas;
  std::vector<double> etas;
  std::vector<std::int64_t> horizons;
  std::int64_t cov_trials = 200000;
  std::uint64_t cov_seed = 1;
  auto* coverage = app.add_subcommand("coverage", "Pose-coverage probability table");
  coverage->add_option("--lambda", lambdas, "Drop probability of the pose")->required();
  coverage->add_option("--eta", etas, "Policy success probability in the other poses")->required();
  coverage->add_option("--T", horizons, "Horizon(s)")->required();
  coverage->add_option("--mc-trials", cov_trials, "Monte-Carlo trials per row");
  coverage->add_option("--seed", cov_seed, "Monte-Carlo seed");

  std::string prior_csv;
  std::string truth_csv;
  std::optional<std::size_t> subset_size;
  std::size_t sets = 10;
  std::uint64_t mm_seed = 1;
  auto* mismatch = app.add_subcommand("mismatch", "Kendall-tau prior mismatch of quality CSVs");
  mismatch->add_option("--prior", prior_csv, "CSV with arm_id,q_prior")->required()->check(CLI::ExistingFile);
  mismatch->add_option("--truth", truth_csv, "CSV with arm_id,q_truth")->required()->check(CLI::ExistingFile);
  mismatch->add_option("--subset-size", subset_size, "Also average over random arm subsets of this size");
  mismatch->add_option("--sets", sets, "Number of subsets to average");
  mismatch->add_option("--seed", mm_seed, "Subset sampling seed");

  std::int64_t verify_trials = 200000;
  std::uint64_t verify_seed = 20200501;
  auto* verify = app.add_subcommand("verify", "Formula-equivalence and Monte-Carlo agreement suites");
  verify->add_option("--mc-trials", verify_trials, "Monte-Carlo trials per point");
  verify->add_option("--seed", verify_seed, "Monte-Carlo seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_and_write(load_config(sim_opt.config_path), sim_opt);
    if (*sweep) {
      ExperimentConfig config = load_config(sweep_opt.config_path);
      std::vector<PolicySpec> policies;
      for (const auto& p : config.policies) {
        if (p.kind != PolicyKind::ThompsonSeeded) policies.push_back(p);
      }
      for (const double s : parse_strengths(strengths_text)) {
        policies.push_back({PolicyKind::ThompsonSeeded, s});
      }
      config.policies = std::move(policies);
      config.validate();
      return run_and_write(config, sweep_opt);
    }
    if (*coverage) return run_coverage(lambdas, etas, horizons, cov_trials, cov_seed);
    if (*mismatch) return run_mismatch(prior_csv, truth_csv, subset_size, sets, mm_seed);
    if (*verify) return run_verify(verify_trials, verify_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
