#include <doctest.h>

#include <cmath>
#include <random>

#include "mfmc/allocation.hpp"
#include "mfmc/short_column.hpp"
#include "test_support.hpp"

using namespace mfmc;

namespace {

EnsembleStatistics make_stats(std::initializer_list<double> sigma,
                              std::initializer_list<double> rho,
                              std::initializer_list<double> costs) {
  EnsembleStatistics s;
  s.sigma = Eigen::Map<const Eigen::VectorXd>(std::data(sigma),
                                              static_cast<long>(sigma.size()));
  s.rho1 = Eigen::Map<const Eigen::VectorXd>(std::data(rho),
                                             static_cast<long>(rho.size()));
  s.costs = Eigen::Map<const Eigen::VectorXd>(std::data(costs),
                                              static_cast<long>(costs.size()));
  return s;
}

// Selected short-column triple (f1, f2, f5) with published correlations.
EnsembleStatistics short_column_triple() {
  return make_stats({1.0, 1.0, 1.0}, {1.0, 0.99994645, 0.99863737},
                    {100.0, 50.0, 5.0});
}

// Selected Burgers triple (f1, f4, f2) with published correlations.
EnsembleStatistics burgers_triple() {
  return make_stats({1.0, 1.0, 1.0}, {1.0, 0.99999507, 0.99766585},
                    {30.5625e-4, 6.3854e-4, 5.5174e-4});
}

}  // namespace

TEST_CASE("solve_relaxed reduces to plain MC for a single model") {
  auto s = make_stats({2.0}, {1.0}, {4.0});
  const auto sol = solve_relaxed(s, 100.0, 0);
  CHECK(sol.m[0] == doctest::Approx(25.0));
  CHECK(sol.alpha.size() == 0);
  CHECK(sol.r[0] == doctest::Approx(1.0));
}

TEST_CASE("solve_relaxed floor matches the large-budget table row") {
  const auto s = short_column_triple();
  const auto sol = solve_relaxed(s, 64.0 * 100.0, 0);
  CHECK(static_cast<int>(std::floor(sol.m[0])) == 2);
  CHECK(static_cast<int>(std::floor(sol.m[1])) == 17);
  CHECK(static_cast<int>(std::floor(sol.m[2])) == 1059);
}

TEST_CASE("solve_relaxed matches an independent numerical minimizer") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = mfmc_test::random_admissible_stats(rng, 4, 4);
    const double p = s.costs.sum() * 40.0;
    const auto sol = solve_relaxed(s, p, 0);
    const auto oracle = mfmc_test::numeric_constrained_minimizer(s, p);
    for (int i = 0; i < 4; ++i)
      CHECK(sol.m[i] == doctest::Approx(oracle.m[i]).epsilon(1e-6));
    for (int i = 0; i < 3; ++i)
      CHECK(sol.alpha[i] == doctest::Approx(oracle.alpha[i]).epsilon(1e-6));
  }
}

TEST_CASE("solve_relaxed rejects bad inputs with named errors") {
  auto increasing = make_stats({1, 1}, {1.0, 1.0 - 1e-9}, {1.0, 2.0});
  increasing.rho1[1] = 1.0;  // duplicate rho^2
  CHECK_THROWS_WITH_AS(solve_relaxed(increasing, 10.0, 0),
                       doctest::Contains("strictly decreasing"),
                       std::invalid_argument);

  // cost ratio violated: cheap surrogate barely correlated
  auto bad_ratio = make_stats({1, 1}, {1.0, 0.1}, {1.0, 0.999});
  CHECK_THROWS_WITH_AS(solve_relaxed(bad_ratio, 10.0, 0),
                       doctest::Contains("cost-ratio"), std::invalid_argument);

  const auto s = short_column_triple();
  CHECK_THROWS_WITH_AS(solve_relaxed(s, 100.0, 2),
                       doctest::Contains("residual budget"),
                       std::invalid_argument);
}

TEST_CASE("allocate_modified reproduces the short-column table counts") {
  const auto s = short_column_triple();
  struct Row {
    double factor;
    int m1, m2, m3;
    double effective;
  };
  const Row rows[] = {{2, 1, 1, 10, 2.0},     {4, 1, 1, 50, 4.0},
                      {8, 1, 1, 120, 7.5},    {16, 1, 4, 258, 15.9},
                      {32, 1, 8, 529, 31.45}, {64, 2, 17, 1059, 63.45}};
  for (const auto& row : rows) {
    const auto plan = allocate_modified(s, row.factor * 100.0);
    CHECK(plan.m[0] == row.m1);
    CHECK(plan.m[1] == row.m2);
    CHECK(plan.m[2] == row.m3);
    CHECK(plan.realized_cost / 100.0 == doctest::Approx(row.effective));
    CHECK(plan.realized_cost <= row.factor * 100.0);
  }
}

TEST_CASE("allocate_naive_rounded reproduces the short-column rounded counts") {
  const auto s = short_column_triple();
  struct Row {
    double factor;
    int m1, m2, m3;
    double effective;
  };
  const Row rows[] = {{2, 1, 1, 33, 3.15},    {4, 1, 1, 66, 4.8},
                      {8, 1, 2, 132, 8.6},    {16, 1, 4, 264, 16.2},
                      {32, 1, 8, 529, 31.45}, {64, 2, 17, 1059, 63.45}};
  for (const auto& row : rows) {
    const auto plan = allocate_naive_rounded(s, row.factor * 100.0);
    CHECK(plan.m[0] == row.m1);
    CHECK(plan.m[1] == row.m2);
    CHECK(plan.m[2] == row.m3);
    CHECK(plan.realized_cost / 100.0 == doctest::Approx(row.effective));
  }
}

TEST_CASE("Burgers triple rows: pinned vs rounded counts") {
  const auto s = burgers_triple();
  const double w1 = s.costs[0];
  const auto modified = allocate_modified(s, 2.0 * w1);
  CHECK(modified.m[0] == 1);
  CHECK(modified.m[1] == 1);
  CHECK(modified.m[2] == 4);
  const auto naive = allocate_naive_rounded(s, 2.0 * w1);
  CHECK(naive.m[0] == 1);
  CHECK(naive.m[1] == 1);
  CHECK(naive.m[2] == 10);
  CHECK(naive.realized_cost > 2.0 * w1);  // budget overrun recorded, not rejected

  const auto mod8 = allocate_modified(s, 8.0 * w1);
  CHECK(mod8.m[0] == 1);
  CHECK(mod8.m[1] == 2);
  CHECK(mod8.m[2] == 36);
}

TEST_CASE("allocate_modified rejects infeasible budgets") {
  const auto s = short_column_triple();
  CHECK_THROWS_WITH_AS(allocate_modified(s, 150.0),
                       doctest::Contains("minimum feasible"),
                       std::invalid_argument);
}

TEST_CASE("methods coincide when every relaxed count is at least one") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = mfmc_test::random_admissible_stats(rng);
    const auto sol = solve_relaxed(s, s.costs.sum() * 200.0, 0);
    if (sol.m.minCoeff() < 1.0) continue;
    const auto a = allocate_modified(s, s.costs.sum() * 200.0);
    const auto b = allocate_naive_rounded(s, s.costs.sum() * 200.0);
    CHECK((a.m - b.m).cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("budget preservation and monotone plans on random ensembles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(1.0, 50.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = mfmc_test::random_admissible_stats(rng);
    const double p = s.costs.sum() * scale(rng);
    const auto plan = allocate_modified(s, p);
    CHECK(plan.realized_cost <= p);
    CHECK(plan.m[0] >= 1);
    for (int i = 1; i < plan.k(); ++i) CHECK(plan.m[i] >= plan.m[i - 1]);
  }
}

TEST_CASE("alpha does not depend on the pinning pivot") {
  std::mt19937_64 rng(13);
  const auto s = mfmc_test::random_admissible_stats(rng, 4, 4);
  const double p = s.costs.sum() * 3.0;
  const auto a0 = solve_relaxed(s, p, 0).alpha;
  for (int prefix = 1; prefix < 3; ++prefix) {
    const auto a = solve_relaxed(s, p, prefix).alpha;
    for (int i = 0; i < a.size(); ++i) CHECK(a[i] == a0[i]);
  }
}

TEST_CASE("predict_mse basics") {
  auto s1 = make_stats({3.0}, {1.0}, {2.0});
  Eigen::VectorXd m1(1), a0(0);
  m1 << 10.0;
  CHECK(predict_mse(m1, a0, s1) == doctest::Approx(9.0 / 10.0));

  const auto s = short_column_triple();
  Eigen::VectorXd m(3), zero(2);
  m << 2, 8, 100;
  zero.setZero();
  CHECK(predict_mse(m, zero, s) == doctest::Approx(s.sigma[0] * s.sigma[0] / 2.0));

  Eigen::VectorXd bad(3);
  bad << 0, 1, 2;
  CHECK_THROWS_AS(predict_mse(bad, zero, s), std::invalid_argument);
}

TEST_CASE("closed-form identities at the relaxed optimum") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> scale(1.0, 30.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = mfmc_test::random_admissible_stats(rng);
    const double p = s.costs.sum() * scale(rng);
    const auto sol = solve_relaxed(s, p, 0);
    const double mse = predict_mse(sol.m, sol.alpha, s);

    const double s1 = s.sigma[0];
    const double rho2_2 =
        s.k() > 1 ? s.rho1[1] * s.rho1[1] : 0.0;
    const double closed =
        s1 * s1 * (1.0 - rho2_2) * p / (sol.m[0] * sol.m[0] * s.costs[0]);
    CHECK(mse == doctest::Approx(closed).epsilon(1e-12));

    const double ratio = variance_ratio(s);
    const double mc = s1 * s1 * s.costs[0] / p;
    CHECK(ratio * ratio == doctest::Approx(mse / mc).epsilon(1e-12));
  }
}

TEST_CASE("variance_ratio is 1 for plain MC and below 1 for the benchmark") {
  auto s1 = make_stats({2.0}, {1.0}, {5.0});
  CHECK(variance_ratio(s1) == doctest::Approx(1.0));
  CHECK(variance_ratio(short_column_triple()) < 1.0);
}

TEST_CASE("pinned-prefix MSE has positive second difference") {
  // convexity of the MSE in the pinned coordinate, suffix re-optimized
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = mfmc_test::random_admissible_stats(rng, 3, 4);
    const double p = s.costs.sum() * 6.0;
    const auto mse_with_m1 = [&](double m1) {
      // continuous suffix optimum with m_1 fixed, via the pinned solve on a
      // budget reduced by the extra (m1 - 1) copies of w_1
      const double residual = p - (m1 - 1.0) * s.costs[0];
      const auto sol = solve_relaxed(s, residual, 1);
      Eigen::VectorXd m = sol.m;
      m[0] = m1;
      return predict_mse(m, sol.alpha, s);
    };
    const int top = static_cast<int>((p - s.costs.sum()) / s.costs[0]);
    for (int m1 = 2; m1 + 1 <= std::min(top, 6); ++m1) {
      const double second =
          mse_with_m1(m1 - 1) - 2 * mse_with_m1(m1) + mse_with_m1(m1 + 1);
      CHECK(second > 0.0);
    }
  }
}

TEST_CASE("brute_force_mip: single model and agreement with the pinned plan") {
  auto s1 = make_stats({2.0}, {1.0}, {3.0});
  const auto mc = brute_force_mip(s1, 20.0, 10);
  CHECK(mc.m[0] == 6);  // floor(20/3)

  std::mt19937_64 rng(23);
  int checked = 0;
  while (checked < 25) {
    const auto s = mfmc_test::random_admissible_stats(rng, 2, 3);
    const double p = s.costs.sum() * 1.5;
    const auto relaxed = solve_relaxed(s, p, 0);
    if (relaxed.m[0] >= 1.0) continue;
    ++checked;
    const auto plan = allocate_modified(s, p);
    const auto oracle = brute_force_mip(s, p, 60);
    CHECK(oracle.predicted_mse <= plan.predicted_mse + 1e-12);
    CHECK(oracle.m[0] == 1);  // pinning at 1 is never beaten
  }
}

TEST_CASE("brute_force_mip reports an empty feasible set") {
  auto s = make_stats({1.0}, {1.0}, {10.0});
  CHECK_THROWS_AS(brute_force_mip(s, 5.0, 4), std::runtime_error);
}
