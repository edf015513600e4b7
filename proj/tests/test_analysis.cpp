#include <doctest.h>

#include <cmath>
#include <vector>

#include "tsgrasp/analysis.hpp"
#include "tsgrasp/errors.hpp"
#include "tsgrasp/verify.hpp"

using namespace tsgrasp;

namespace {

bool within_3se(const MonteCarloEstimate& mc, double p) {
  return std::abs(mc.estimate - p) <= 3.0 * std::sqrt(p * (1.0 - p) / mc.trials);
}

}  // namespace

TEST_CASE("coverage examples") {
  for (const double lambda : {0.0, 0.2, 0.7, 1.0}) {
    for (const double eta : {0.0, 0.5, 1.0}) {
      CHECK(coverage_double_sum({lambda, eta, 1}) == lambda);
      CHECK(coverage_closed_form({lambda, eta, 1}) == doctest::Approx(lambda).epsilon(1e-15));
    }
  }
  CHECK(coverage_double_sum({0.2, 0.5, 3}) == doctest::Approx(0.352).epsilon(1e-14));
  CHECK(coverage_closed_form({0.2, 0.5, 3}) == doctest::Approx(0.352).epsilon(1e-14));
  CHECK(coverage_double_sum({0.3, 1.0, 4}) == doctest::Approx(0.7599).epsilon(1e-14));
  CHECK(coverage_closed_form({0.3, 1.0, 4}) == doctest::Approx(0.7599).epsilon(1e-14));
  for (const std::int64_t t : {1, 2, 10, 300}) {
    CHECK(coverage_closed_form({0.35, 0.0, t}) == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(coverage_double_sum({0.35, 0.0, t}) == doctest::Approx(0.35).epsilon(1e-15));
  }
}

TEST_CASE("coverage query validation") {
  CHECK_THROWS_AS(coverage_closed_form({1.2, 0.5, 3}), ParameterDomainError);
  CHECK_THROWS_AS(coverage_double_sum({0.2, -0.1, 3}), ParameterDomainError);
  CHECK_THROWS_AS(coverage_closed_form({0.2, 0.5, 0}), ParameterDomainError);
}

TEST_CASE("miss_probability examples") {
  for (const std::int64_t t : {1, 5, 100}) {
    for (const double eta : {0.0, 0.3, 1.0}) {
      CHECK(std::abs(miss_probability(0.0, eta, t) - 1.0) <= 1e-12);
      CHECK(miss_probability(1.0, eta, t) == 0.0);
    }
  }
  // 0.99 * 0.992^99, evaluated independently to 17 digits.
  CHECK(miss_probability(0.01, 0.8, 100) == doctest::Approx(0.44698272400105593).epsilon(1e-12));
}

TEST_CASE("double sum stays exact for long horizons") {
  // Factorials overflow long before these horizons.
  for (const std::int64_t t : {500, 2000}) {
    for (const double lambda : {0.001, 0.01, 0.3}) {
      for (const double eta : {0.05, 0.5, 0.95}) {
        const CoverageQuery q{lambda, eta, t};
        const double ds = coverage_double_sum(q);
        REQUIRE(std::isfinite(ds));
        CHECK(relative_error(ds, coverage_closed_form(q)) <= 1e-9);
        const double miss = std::exp(std::log1p(-lambda) + (t - 1) * std::log1p(-eta * lambda));
        CHECK(relative_error(miss_probability(lambda, eta, t), miss) <= 1e-9);
      }
    }
  }
}

TEST_CASE("formula equivalence and miss identity over the standard grid") {
  const auto grid = CoverageGrid::standard();
  const auto eq = check_formula_equivalence(grid);
  CHECK(eq.points == 7 * 5 * 200);
  CHECK(eq.max_relative_error <= 1e-9);
  const auto miss = check_miss_identity(grid);
  CHECK(miss.max_relative_error <= 1e-9);
}

TEST_CASE("coverage is monotone in T, lambda and eta") {
  const std::vector<double> levels{0.0, 0.05, 0.2, 0.5, 0.8, 1.0};
  for (const double a : levels) {
    for (const double b : levels) {
      for (std::int64_t t = 1; t < 60; t += 3) {
        for (auto f : {coverage_closed_form, coverage_double_sum}) {
          const double base = f({a, b, t});
          CHECK(f({a, b, t + 1}) >= base - 1e-15);
          if (a < 1.0) CHECK(f({std::min(1.0, a + 0.1), b, t}) >= base - 1e-15);
          if (b < 1.0) CHECK(f({a, std::min(1.0, b + 0.1), t}) >= base - 1e-15);
        }
      }
    }
  }
}

TEST_CASE("Monte Carlo examples") {
  const auto certain = coverage_monte_carlo({1.0, 0.3, 5}, 1000, 1);
  CHECK(certain.estimate == 1.0);
  CHECK(certain.standard_error == 0.0);

  CHECK(within_3se(coverage_monte_carlo({0.2, 0.5, 3}, 200000, 2), 0.352));
  CHECK(within_3se(coverage_monte_carlo({0.3, 0.0, 50}, 200000, 3), 0.3));
  CHECK_THROWS_AS(coverage_monte_carlo({0.3, 0.0, 50}, 0, 3), ParameterDomainError);
}

TEST_CASE("Monte Carlo: serial and parallel paths agree exactly") {
  for (const std::int64_t trials : {1, 8191, 8192, 50001}) {
    const CoverageQuery q{0.1, 0.6, 12};
    const auto a = coverage_monte_carlo(q, trials, 9);
    const auto b = coverage_monte_carlo_serial(q, trials, 9);
    CHECK(a.hits == b.hits);
    CHECK(a.trials == trials);
    CHECK(a.estimate == b.estimate);
    CHECK(a.standard_error == b.standard_error);
  }
}

TEST_CASE("Monte Carlo agrees with the closed form at the standard points") {
  const auto check = check_monte_carlo_agreement(standard_monte_carlo_points(), 200000, 20200501);
  CHECK(check.points.size() == 20);
  CHECK(check.within >= 19);
}

TEST_CASE("per_pose_regret examples") {
  const auto model = PoseModel::single(GroundTruth({0.3, 0.8}));
  std::vector<BeliefState> beliefs{BeliefState::uniform(2)};
  const auto oracle = run_episode(model, PolicyKind::Oracle, beliefs, {}, 500, 1);
  CHECK(per_pose_regret(oracle, model, 0) == 0.0);
  for (const double r : cumulative_regret(oracle, model)) CHECK(r == 0.0);

  Trajectory one;
  one.steps.push_back({1, 0, 0, 0});
  CHECK(per_pose_regret(one, model, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(per_pose_regret(one, model, 1), IndexError);

  // Uniform random pulls: expected per-round gap 0.5 * 0.4.
  const GroundTruth truth({0.2, 0.6});
  const auto uniform_model = PoseModel::single(truth);
  Rng rng(2);
  Trajectory random;
  for (std::int64_t t = 1; t <= 10000; ++t) {
    const auto arm = uniform_index(2, rng);
    random.steps.push_back({t, 0, arm, sample_reward(truth.probs[arm], rng)});
  }
  const double per_round = per_pose_regret(random, uniform_model, 0) / 1e4;
  // Per-round gap is 0 or 0.4 with equal odds: standard deviation 0.2.
  CHECK(std::abs(per_round - 0.2) <= 3.0 * 0.2 / 100.0);
}

TEST_CASE("weighted_regret examples") {
  const std::vector<std::int64_t> rounds1{10};
  CHECK(weighted_regret(std::vector<double>{4.5}, std::vector<double>{1.0}, rounds1).total == 4.5);
  const std::vector<std::int64_t> rounds2{5, 5};
  CHECK(weighted_regret(std::vector<double>{2, 4}, std::vector<double>{0.5, 0.5}, rounds2).total == 3.0);
  const auto l = weighted_regret(std::vector<double>{1, 10}, std::vector<double>{0.9, 0.1}, rounds2);
  CHECK(l.total == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(l.total_rounds == 10);
  CHECK_THROWS_AS(weighted_regret(std::vector<double>{1}, std::vector<double>{0.5, 0.5}, rounds2),
                  ShapeError);
}

TEST_CASE("regret ledger invariants on multi-pose trajectories") {
  const PoseModel model({0.5, 0.3, 0.2},
                        {GroundTruth({0.2, 0.7}), GroundTruth({0.5, 0.4, 0.1}), GroundTruth({0.9})});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<BeliefState> beliefs{BeliefState::uniform(2), BeliefState::uniform(3),
                                     BeliefState::uniform(1)};
    const auto traj = run_episode(model, PolicyKind::ThompsonUniform, beliefs, {}, 300, seed);
    const auto ledger = regret_ledger(traj, model);
    std::int64_t rounds = 0;
    double weighted = 0.0;
    double worst = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK(ledger.per_pose_regret[l] >= 0.0);
      rounds += ledger.pose_rounds[l];
      weighted += ledger.drop_probs[l] * ledger.per_pose_regret[l];
      worst = std::max(worst, ledger.per_pose_regret[l]);
    }
    CHECK(rounds == 300);
    CHECK(ledger.total_rounds == 300);
    CHECK(ledger.total == doctest::Approx(weighted).epsilon(1e-15));
    CHECK(ledger.total <= worst + 1e-12);
    CHECK(ledger.per_pose_regret[2] == 0.0);  // single arm
    const auto cumulative = cumulative_regret(traj, model);
    CHECK(cumulative.back() ==
          doctest::Approx(ledger.per_pose_regret[0] + ledger.per_pose_regret[1] +
                          ledger.per_pose_regret[2]));
  }
}

TEST_CASE("regret_bound examples") {
  const double t = 10000.0;
  CHECK(regret_bound(std::vector<double>{1.0}, 7, 10000).value ==
        doctest::Approx(std::sqrt(7 * t * std::log(t))).epsilon(1e-14));
  CHECK(regret_bound(std::vector<double>{1.0}, 7, 10000, 2.5).value ==
        doctest::Approx(2.5 * std::sqrt(7 * t * std::log(t))).epsilon(1e-14));
  CHECK(regret_bound(std::vector<double>{1.0}, 1, 10000).value > 0.0);
  // 2 * 0.5^1.5 * sqrt(10 * 1e4 * ln 5000), evaluated to 17 digits.
  CHECK(regret_bound(std::vector<double>{0.5, 0.5}, 10, 10000).value ==
        doctest::Approx(652.5792362394102).epsilon(1e-12));
  const auto partial = regret_bound(std::vector<double>{0.999, 0.001}, 10, 500);
  CHECK(partial.excluded_poses == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(regret_bound(std::vector<double>{1.0}, 0, 10), EmptyArmSetError);
}

TEST_CASE("single-arm Thompson sampling has zero regret") {
  const auto model = PoseModel::single(GroundTruth({0.4}));
  std::vector<BeliefState> beliefs{BeliefState::uniform(1)};
  const auto traj = run_episode(model, PolicyKind::ThompsonUniform, beliefs, {}, 1000, 3);
  CHECK(regret_ledger(traj, model).total == 0.0);
}
