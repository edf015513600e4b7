#include "tsgrasp/output.hpp"

#include <charconv>
#include <fstream>

#include "tsgrasp/errors.hpp"

namespace tsgrasp {

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "policy,env_id,arm_set_id,run_id,mismatch,scaled_sum\n";
  for (const auto& r : records) {
    out << r.policy << ',' << r.env_id << ',' << r.arm_set_id << ',' << r.run_id << ','
        << format_number(r.mismatch) << ',' << format_number(r.scaled_sum) << '\n';
  }
}

void write_curves_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<RunRecord>& records) {
  out << "policy,env_id,arm_set_id,run_id,eval_step,mean_reward\n";
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.eval_curve.size(); ++i) {
      out << r.policy << ',' << r.env_id << ',' << r.arm_set_id << ',' << r.run_id << ','
          << static_cast<std::int64_t>(i) * config.eval_every << ','
          << format_number(r.eval_curve[i]) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  out << "policy,scope,bin_lo,bin_hi,count,mean_scaled_sum,std_scaled_sum,std_defined\n";
  auto row = [&](const std::string& policy, const char* scope, double lo, double hi, const Stats& s) {
    out << policy << ',' << scope << ',' << format_number(lo) << ',' << format_number(hi) << ','
        << s.count << ',' << format_number(s.mean) << ',' << format_number(s.stddev) << ','
        << (s.stddev_defined ? 1 : 0) << '\n';
  };
  for (const auto& p : table.policies) {
    row(p.policy, "all", 0.0, 1.0, p.overall);
    for (const auto& [bin, stats] : p.bins) {
      row(p.policy, "mismatch_bin", bin * kMismatchBinWidth, (bin + 1) * kMismatchBinWidth, stats);
    }
  }
}

void write_results(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const ExperimentResult& result) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, result.records);
  }
  {
    auto f = open("curves.csv");
    write_curves_csv(f, config, result.records);
  }
  {
    auto f = open("summary.csv");
    if (!result.records.empty()) write_summary_csv(f, aggregate(result.records));
  }
  nlohmann::json envs = nlohmann::json::array();
  for (const auto& e : result.environments) {
    envs.push_back({{"env_id", e.env_id},
                    {"target_mismatch", e.target_mismatch},
                    {"achieved_mismatch", e.achieved_mismatch},
                    {"sigma", e.sigma},
                    {"reversed", e.reversed}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : result.skipped) skipped.push_back({{"env_id", s.env_id}, {"reason", s.reason}});
  const nlohmann::json manifest = {{"tool", "tsgrasp"},
                                   {"version", kToolVersion},
                                   {"master_seed", config.master_seed},
                                   {"config", config_to_json(config)},
                                   {"environments", envs},
                                   {"skipped_environments", skipped}};
  auto f = open("manifest.json");
  f << manifest.dump(2) << '\n';
}

}  // namespace tsgrasp
