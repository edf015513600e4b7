#include "tsgrasp/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "tsgrasp/random.hpp"

namespace tsgrasp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
IdentityCheck scan(const CoverageGrid& grid, Fn&& pair_of_values) {
  IdentityCheck check;
  const auto start = Clock::now();
  for (const double lambda : grid.lambdas) {
    for (const double eta : grid.etas) {
      for (std::int64_t t = 1; t <= grid.max_horizon; ++t) {
        const CoverageQuery q{lambda, eta, t};
        const auto [value, reference] = pair_of_values(q);
        const double err = relative_error(value, reference);
        ++check.points;
        if (!(err <= check.max_relative_error)) {
          check.max_relative_error = err;
          check.worst = q;
        }
      }
    }
  }
  check.seconds = elapsed(start);
  return check;
}

}  // namespace

CoverageGrid CoverageGrid::standard() {
  return {{0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 0.99}, {0.0, 0.1, 0.5, 0.9, 1.0}, 200};
}

double relative_error(double value, double reference) {
  if (value == reference) return 0.0;
  return std::abs(value - reference) /
         std::max(std::abs(reference), std::numeric_limits<double>::min());
}

IdentityCheck check_formula_equivalence(const CoverageGrid& grid) {
  return scan(grid, [](const CoverageQuery& q) {
    return std::pair{coverage_double_sum(q), coverage_closed_form(q)};
  });
}

IdentityCheck check_miss_identity(const CoverageGrid& grid) {
  return scan(grid, [](const CoverageQuery& q) {
    const double eps = q.lambda_i;
    const double reference =
        (1.0 - eps) * std::pow(1.0 - q.eta * eps, static_cast<double>(q.horizon - 1));
    return std::pair{miss_probability(eps, q.eta, q.horizon), reference};
  });
}

std::vector<CoverageQuery> standard_monte_carlo_points() {
  // Coverage between roughly 0.02 and 0.95 at every point, so the binomial
  // standard error is informative.
  return {{0.01, 0.5, 50}, {0.01, 0.9, 25},  {0.01, 1.0, 10}, {0.01, 0.1, 200},
          {0.05, 0.0, 10}, {0.05, 0.5, 10},  {0.05, 0.9, 25}, {0.05, 1.0, 50},
          {0.1, 0.1, 50},  {0.1, 0.5, 3},    {0.1, 0.9, 10},  {0.1, 1.0, 25},
          {0.3, 0.0, 25},  {0.3, 0.1, 25},   {0.3, 0.5, 5},   {0.3, 0.9, 3},
          {0.5, 0.0, 50},  {0.5, 0.1, 10},   {0.5, 0.5, 3},   {0.5, 0.9, 2}};
}

MonteCarloCheck check_monte_carlo_agreement(const std::vector<CoverageQuery>& points,
                                            std::int64_t trials, std::uint64_t seed) {
  MonteCarloCheck check;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < points.size(); ++i) {
    MonteCarloPoint p;
    p.query = points[i];
    p.closed_form = coverage_closed_form(p.query);
    p.mc = coverage_monte_carlo(p.query, trials, seed_stream(seed, {i}));
    p.within_three_se = std::abs(p.mc.estimate - p.closed_form) <= 3.0 * p.mc.standard_error;
    // A degenerate point (SE = 0) agrees only on exact equality.
    if (p.mc.standard_error == 0.0) p.within_three_se = p.mc.estimate == p.closed_form;
    check.within += p.within_three_se ? 1 : 0;
    check.points.push_back(p);
  }
  check.seconds = elapsed(start);
  return check;
}

}  // namespace tsgrasp
