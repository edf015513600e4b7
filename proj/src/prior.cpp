#include "tsgrasp/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "tsgrasp/errors.hpp"

namespace tsgrasp {

PriorEstimate::PriorEstimate(std::vector<double> q, double s) : qualities(std::move(q)), strength(s) {
  if (!(std::isfinite(strength) && strength > 0.0)) {
    throw ParameterDomainError("prior strength must be positive");
  }
  for (const double x : qualities) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterDomainError("prior quality outside [0, 1]");
  }
}

BeliefState seed_beliefs(const PriorEstimate& prior) {
  if (prior.qualities.empty()) throw EmptyArmSetError();
  if (!(std::isfinite(prior.strength) && prior.strength > 0.0)) {
    throw ParameterDomainError("prior strength must be positive");
  }
  std::vector<double> alphas;
  std::vector<double> betas;
  alphas.reserve(prior.qualities.size());
  betas.reserve(prior.qualities.size());
  for (const double q : prior.qualities) {
    const double clamped = std::clamp(q, kQualityClamp, 1.0 - kQualityClamp);
    alphas.push_back(prior.strength * clamped);
    betas.push_back(prior.strength * (1.0 - clamped));
  }
  return BeliefState(std::move(alphas), std::move(betas));
}

MismatchReport kendall_tau(std::span<const double> q_prior, std::span<const double> q_truth) {
  if (q_prior.size() != q_truth.size()) {
    throw ShapeError("prior and truth vectors differ in length");
  }
  if (q_prior.size() < 2) throw ShapeError("Kendall's tau needs at least two arms");
  MismatchReport r;
  const std::size_t n = q_prior.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = q_prior[i] - q_prior[j];
      const double dg = q_truth[i] - q_truth[j];
      if (dp == 0.0 && dg == 0.0) {
        ++r.ties_joint;
      } else if (dp == 0.0) {
        ++r.ties_prior;
      } else if (dg == 0.0) {
        ++r.ties_truth;
      } else if ((dp > 0.0) == (dg > 0.0)) {
        ++r.concordant;
      } else {
        ++r.discordant;
      }
    }
  }
  const std::int64_t untied = r.concordant + r.discordant;
  const std::int64_t prior_factor = untied + r.ties_prior;
  const std::int64_t truth_factor = untied + r.ties_truth;
  if (prior_factor == 0 || truth_factor == 0) {
    throw DegenerateRankingError("Kendall's tau undefined: a ranking is fully tied");
  }
  r.tau = static_cast<double>(r.concordant - r.discordant) /
          std::sqrt(static_cast<double>(prior_factor) * static_cast<double>(truth_factor));
  r.mismatch = (1.0 - r.tau) / 2.0;
  return r;
}

double averaged_mismatch(std::span<const double> prior_pool, std::span<const double> truth_pool,
                         std::size_t subset_size, std::size_t n_sets, Rng& rng) {
  if (prior_pool.size() != truth_pool.size()) throw ShapeError("pools differ in length");
  if (subset_size < 2 || subset_size > prior_pool.size()) {
    throw ShapeError("subset size must be in [2, pool size]");
  }
  if (n_sets == 0) throw ParameterDomainError("n_sets must be positive");

  std::vector<std::size_t> index(prior_pool.size());
  std::vector<double> sub_prior(subset_size);
  std::vector<double> sub_truth(subset_size);
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t s = 0; s < n_sets; ++s) {
    std::iota(index.begin(), index.end(), std::size_t{0});
    for (std::size_t i = 0; i < subset_size; ++i) {
      const std::size_t j = i + uniform_index(index.size() - i, rng);
      std::swap(index[i], index[j]);
      sub_prior[i] = prior_pool[index[i]];
      sub_truth[i] = truth_pool[index[i]];
    }
    try {
      total += kendall_tau(sub_prior, sub_truth).mismatch;
      ++used;
    } catch (const DegenerateRankingError&) {
    }
  }
  if (used == 0) throw DegenerateRankingError("every sampled arm set had a fully tied ranking");
  return total / static_cast<double>(used);
}

namespace {

std::vector<double> draw_truth(const TruthSpec& spec, Rng& rng) {
  std::vector<double> probs(spec.arm_count);
  if (const auto* beta = std::get_if<BetaFamily>(&spec.family)) {
    for (double& p : probs) p = beta_sample(beta->a, beta->b, rng);
    return probs;
  }
  const auto& sparse = std::get<SparseProfile>(spec.family);
  auto jitter = [&](double centre) {
    const double offset = sparse.spread * (2.0 * uniform01(rng) - 1.0);
    return std::clamp(centre + offset, 0.0, 1.0);
  };
  std::vector<std::size_t> order(spec.arm_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < sparse.n_good; ++i) {
    std::swap(order[i], order[i + uniform_index(order.size() - i, rng)]);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    probs[order[i]] = jitter(i < sparse.n_good ? sparse.q_hi : sparse.q_lo);
  }
  return probs;
}

}  // namespace

GroundTruth generate_ground_truth(const TruthSpec& spec, Rng& rng) {
  if (spec.arm_count == 0) throw EmptyArmSetError();
  if (const auto* beta = std::get_if<BetaFamily>(&spec.family)) {
    if (!(beta->a > 0.0 && beta->b > 0.0)) throw ConfigError("Beta family needs a, b > 0");
  } else {
    const auto& sparse = std::get<SparseProfile>(spec.family);
    if (sparse.n_good > spec.arm_count) throw ConfigError("n_good exceeds arm count");
    if (!(sparse.q_hi >= 0.0 && sparse.q_hi <= 1.0 && sparse.q_lo >= 0.0 && sparse.q_lo <= 1.0) ||
        sparse.spread < 0.0) {
      throw ConfigError("sparse profile levels must lie in [0, 1] with non-negative spread");
    }
  }
  for (int attempt = 0; attempt < kTruthRetries; ++attempt) {
    auto probs = draw_truth(spec, rng);
    if (std::any_of(probs.begin(), probs.end(), [](double p) { return p > 0.0; })) {
      return GroundTruth(std::move(probs));
    }
  }
  throw GenerationError("ground truth had no positive arm after " + std::to_string(kTruthRetries) +
                        " draws");
}

std::vector<double> break_ties(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const std::size_t run = end - start;
    if (run > 1) {
      const double v = values[order[start]];
      const double step = 1e-9 / static_cast<double>(run);
      for (std::size_t r = 0; r < run; ++r) {
        const double offset = v >= 0.5 ? -static_cast<double>(run - 1 - r) * step
                                        : static_cast<double>(r) * step;
        out[order[start + r]] = v + offset;
      }
    }
    start = end;
  }
  return out;
}

std::vector<double> rank_matched(std::span<const double> values, std::span<const double> reference) {
  if (values.size() != reference.size()) throw ShapeError("values and reference differ in length");
  const std::size_t n = values.size();
  std::vector<double> levels(reference.begin(), reference.end());
  std::sort(levels.begin(), levels.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    const double level = std::accumulate(levels.begin() + static_cast<std::ptrdiff_t>(start),
                                         levels.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                         static_cast<double>(end - start);
    for (std::size_t r = start; r < end; ++r) out[order[r]] = level;
    start = end;
  }
  return out;
}

std::vector<double> rank_spaced(std::span<const double> values, double lo, double hi) {
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) throw ParameterDomainError("need 0 <= lo <= hi <= 1");
  const std::size_t n = values.size();
  if (n < 2) return std::vector<double>(n, 0.5 * (lo + hi));
  std::vector<double> levels(n);
  for (std::size_t r = 0; r < n; ++r) {
    levels[r] = lo + (hi - lo) * static_cast<double>(r) / static_cast<double>(n - 1);
  }
  return rank_matched(values, levels);
}

namespace {

bool has_ties(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

// Same multiset of values, opposite ranking.
std::vector<double> rank_reversed(std::span<const double> tie_free) {
  std::vector<std::size_t> order(tie_free.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tie_free[a] < tie_free[b]; });
  std::vector<double> out(tie_free.size());
  const std::size_t n = order.size();
  for (std::size_t r = 0; r < n; ++r) out[order[r]] = tie_free[order[n - 1 - r]];
  return out;
}

class NoisyPrior {
 public:
  NoisyPrior(std::span<const double> truth, std::vector<double> noise, std::uint64_t subset_seed,
             const MismatchSampling& sampling)
      : truth_(truth), noise_(std::move(noise)), subset_seed_(subset_seed), sampling_(sampling) {}

  std::vector<double> build(std::span<const double> base, double sigma) const {
    std::vector<double> q(base.size());
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::clamp(base[k] + sigma * noise_[k], 0.0, 1.0);
    return q;
  }

  double measure(std::span<const double> base, double sigma) const {
    const auto q = build(base, sigma);
    Rng rng(subset_seed_);
    const std::size_t subset = sampling_.subset_size == 0 ? truth_.size() : sampling_.subset_size;
    return averaged_mismatch(q, truth_, subset, sampling_.subset_size == 0 ? 1 : sampling_.n_sets,
                             rng);
  }

 private:
  std::span<const double> truth_;
  std::vector<double> noise_;
  std::uint64_t subset_seed_;
  MismatchSampling sampling_;
};

}  // namespace

PriorSynthesis synthesize_prior(const GroundTruth& truth, double target_mismatch, double tolerance,
                                const MismatchSampling& sampling, Rng& rng) {
  if (!(tolerance > 0.0)) throw ParameterDomainError("tolerance must be positive");
  if (!(target_mismatch >= 0.0 && target_mismatch <= 1.0)) {
    throw ParameterDomainError("target mismatch outside [0, 1]");
  }
  const std::span<const double> q_truth = truth.probs;
  if (q_truth.size() < 2) throw ShapeError("prior synthesis needs at least two arms");

  std::vector<double> noise(q_truth.size());
  for (double& z : noise) z = standard_normal(rng);
  const NoisyPrior noisy(q_truth, std::move(noise), rng(), sampling);

  double closest = -1.0;
  auto remember = [&](double m) {
    if (closest < 0.0 || std::abs(m - target_mismatch) < std::abs(closest - target_mismatch)) {
      closest = m;
    }
  };
  auto accept = [&](std::span<const double> base, double sigma, bool reversed, double m) {
    return PriorSynthesis{noisy.build(base, sigma), sigma, reversed, m};
  };

  // Bracket upwards from a tiny sigma (doubling towards kMaxNoiseScale), then
  // bisect inside the first bracket that crosses the target. Starting small
  // keeps the search in the regime where clamping has not yet created large
  // tie blocks, where the mismatch is far from monotone in sigma.
  // `increasing` says whether the mismatch grows with sigma.
  auto search = [&](std::span<const double> base, bool increasing,
                    bool reversed) -> std::optional<PriorSynthesis> {
    auto past_target = [&](double m) { return increasing ? m >= target_mismatch : m <= target_mismatch; };
    int budget = kCalibrationIterations;
    double lo = 0.0;
    double hi = kMaxNoiseScale * std::ldexp(1.0, -kBracketDoublings);
    for (; budget > 0; --budget) {
      const double m = noisy.measure(base, hi);
      remember(m);
      if (std::abs(m - target_mismatch) <= tolerance) return accept(base, hi, reversed, m);
      if (past_target(m)) break;
      if (hi >= kMaxNoiseScale) return std::nullopt;
      lo = hi;
      hi = std::min(2.0 * hi, kMaxNoiseScale);
    }
    for (; budget > 0; --budget) {
      const double mid = 0.5 * (lo + hi);
      const double m = noisy.measure(base, mid);
      remember(m);
      if (std::abs(m - target_mismatch) <= tolerance) return accept(base, mid, reversed, m);
      if (past_target(m)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return std::nullopt;
  };

  const double fwd_lo = noisy.measure(q_truth, 0.0);
  remember(fwd_lo);
  if (std::abs(fwd_lo - target_mismatch) <= tolerance) return accept(q_truth, 0.0, false, fwd_lo);
  const double fwd_hi = noisy.measure(q_truth, kMaxNoiseScale);
  remember(fwd_hi);
  if (std::abs(fwd_hi - target_mismatch) <= tolerance) {
    return accept(q_truth, kMaxNoiseScale, false, fwd_hi);
  }
  if (target_mismatch > fwd_lo && target_mismatch < fwd_hi) {
    if (auto found = search(q_truth, true, false)) return *found;
  } else if (target_mismatch > fwd_hi) {
    const auto tie_free = has_ties(q_truth) ? break_ties(q_truth) : std::vector<double>(q_truth.begin(), q_truth.end());
    const auto reversed = rank_reversed(tie_free);
    const double rev_lo = noisy.measure(reversed, 0.0);
    remember(rev_lo);
    if (std::abs(rev_lo - target_mismatch) <= tolerance) return accept(reversed, 0.0, true, rev_lo);
    const double rev_hi = noisy.measure(reversed, kMaxNoiseScale);
    remember(rev_hi);
    if (target_mismatch < rev_lo && target_mismatch > rev_hi) {
      if (auto found = search(reversed, false, true)) return *found;
    }
  }
  std::ostringstream msg;
  msg << "could not calibrate prior to mismatch " << target_mismatch << " +/- " << tolerance
      << " (closest " << closest << ")";
  throw CalibrationError(msg.str(), closest);
}

QualityTable read_quality_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int id_col = column("arm_id");
  const int prior_col = column("q_prior");
  const int truth_col = column("q_truth");
  if (id_col < 0 || (prior_col < 0 && truth_col < 0)) {
    throw ConfigError(path.string() + ": expected header arm_id,q_prior,q_truth");
  }

  QualityTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    }
    try {
      table.arm_ids.push_back(std::stoll(cells[static_cast<std::size_t>(id_col)]));
      if (prior_col >= 0) table.q_prior.push_back(std::stod(cells[static_cast<std::size_t>(prior_col)]));
      if (truth_col >= 0) table.q_truth.push_back(std::stod(cells[static_cast<std::size_t>(truth_col)]));
    } catch (const std::logic_error&) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return table;
}

void write_quality_csv(const std::filesystem::path& path, const QualityTable& table) {
  if (table.q_prior.size() != table.arm_ids.size() || table.q_truth.size() != table.arm_ids.size()) {
    throw ShapeError("quality table columns differ in length");
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.precision(17);
  out << "arm_id,q_prior,q_truth\n";
  for (std::size_t k = 0; k < table.arm_ids.size(); ++k) {
    out << table.arm_ids[k] << ',' << table.q_prior[k] << ',' << table.q_truth[k] << '\n';
  }
}

}  // namespace tsgrasp
