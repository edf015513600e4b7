#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsgrasp/analysis.hpp"

namespace tsgrasp {

/// Cartesian (lambda, eta, T) grid for the coverage identities.
struct CoverageGrid {
  std::vector<double> lambdas;
  std::vector<double> etas;
  std::int64_t max_horizon = 200;  // T runs over 1..max_horizon

  static CoverageGrid standard();
};

struct IdentityCheck {
  std::size_t points = 0;
  double max_relative_error = 0.0;
  CoverageQuery worst;
  double seconds = 0.0;
};

/// |a - b| / max(|b|, DBL_MIN): relative error, floored at the smallest
/// normal double so that subnormal results are compared absolutely.
double relative_error(double value, double reference);

/// coverage_double_sum against coverage_closed_form over the grid.
IdentityCheck check_formula_equivalence(const CoverageGrid& grid);

/// miss_probability(eps, eta, T) against (1-eps)(1-eta eps)^(T-1) over the grid.
IdentityCheck check_miss_identity(const CoverageGrid& grid);

struct MonteCarloPoint {
  CoverageQuery query;
  double closed_form = 0.0;
  MonteCarloEstimate mc;
  bool within_three_se = false;
};

struct MonteCarloCheck {
  std::vector<MonteCarloPoint> points;
  std::size_t within = 0;
  double seconds = 0.0;
};

/// Twenty (lambda, eta, T) points with non-degenerate coverage probabilities.
std::vector<CoverageQuery> standard_monte_carlo_points();

MonteCarloCheck check_monte_carlo_agreement(const std::vector<CoverageQuery>& points,
                                            std::int64_t trials, std::uint64_t seed);

}  // namespace tsgrasp
