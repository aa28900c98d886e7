#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfmc/statistics.hpp"

namespace mfmc {

enum class Method { mc, modified, naive_rounded };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::mc: return "mc";
    case Method::modified: return "modified";
    case Method::naive_rounded: return "naive-rounded";
  }
  return "?";
}

// Admissibility for the closed-form allocation: strictly decreasing squared
// correlations and the cost-ratio conditions with rho_{1,k+1} = 0.
inline void require_admissible(const EnsembleStatistics& stats) {
  stats.validate();
  const int k = stats.k();
  auto rho2 = [&](int i) {
    return i < k ? stats.rho1[i] * stats.rho1[i] : 0.0;
  };
  for (int i = 1; i <= k; ++i)
    if (!(rho2(i - 1) > rho2(i)))
      throw std::invalid_argument(
          "allocation: squared correlations must be strictly decreasing "
          "(violated between models " + std::to_string(i - 1) + " and " +
          std::to_string(i) + ")");
  for (int i = 1; i < k; ++i)
    if (!(stats.costs[i - 1] / stats.costs[i] >
          (rho2(i - 1) - rho2(i)) / (rho2(i) - rho2(i + 1))))
      throw std::invalid_argument(
          "allocation: cost-ratio condition fails between models " +
          std::to_string(i - 1) + " and " + std::to_string(i));
}

struct RelaxedSolution {
  Eigen::VectorXd m;      // size k; entries before pivot are pinned at 1
  Eigen::VectorXd alpha;  // size k-1, alpha_i = rho_{1,i} sigma_1 / sigma_i
  Eigen::VectorXd r;      // ratios m_j / m_pivot; r[pivot] = 1, zero before
  int pivot = 0;          // first free index
};

inline Eigen::VectorXd control_variate_weights(const EnsembleStatistics& stats) {
  const int k = stats.k();
  Eigen::VectorXd alpha(k - 1);
  for (int i = 1; i < k; ++i)
    alpha[i - 1] = stats.rho1[i] * stats.sigma[0] / stats.sigma[i];
  return alpha;
}

// Closed-form minimizer of the relaxed allocation with the first
// fixed_prefix_len counts pinned at 1 and the remainder free. The free
// components spend the residual budget p - sum of pinned costs.
inline RelaxedSolution solve_relaxed(const EnsembleStatistics& stats,
                                     double budget, int fixed_prefix_len = 0) {
  require_admissible(stats);
  const int k = stats.k();
  const int i0 = fixed_prefix_len;
  if (i0 < 0 || i0 >= k)
    throw std::invalid_argument("solve_relaxed: fixed_prefix_len out of range");

  double spent = 0.0;
  for (int j = 0; j < i0; ++j) spent += stats.costs[j];
  if (!(budget > spent))
    throw std::invalid_argument(
        "solve_relaxed: residual budget is not positive after pinning " +
        std::to_string(i0) + " models");

  auto rho2 = [&](int i) { return i < k ? stats.rho1[i] * stats.rho1[i] : 0.0; };

  RelaxedSolution sol;
  sol.pivot = i0;
  sol.m.setOnes(k);
  sol.r.setZero(k);
  sol.alpha = control_variate_weights(stats);

  const double pivot_gap = rho2(i0) - rho2(i0 + 1);
  double denom = 0.0;
  for (int j = i0; j < k; ++j) {
    sol.r[j] = std::sqrt(stats.costs[i0] / stats.costs[j] *
                         (rho2(j) - rho2(j + 1)) / pivot_gap);
    denom += stats.costs[j] * sol.r[j];
  }
  const double m_pivot = (budget - spent) / denom;
  for (int j = i0; j < k; ++j) sol.m[j] = m_pivot * sol.r[j];
  return sol;
}

struct SamplingPlan {
  Eigen::VectorXi m;      // positive, nondecreasing, m[0] >= 1
  Eigen::VectorXd alpha;  // length k-1
  double predicted_mse = 0.0;
  double realized_cost = 0.0;
  double budget = 0.0;
  Method method = Method::modified;

  int k() const { return static_cast<int>(m.size()); }
};

// MSE of the estimator for given counts and weights:
//   sigma_1^2/m_1 + sum_{i>=2} (1/m_{i-1} - 1/m_i)(alpha_i^2 sigma_i^2
//                                                  - 2 alpha_i sigma_i sigma_1 rho_{1,i})
inline double predict_mse(const Eigen::VectorXd& m, const Eigen::VectorXd& alpha,
                          const EnsembleStatistics& stats) {
  const int k = stats.k();
  if (m.size() != k || alpha.size() != k - 1)
    throw std::invalid_argument("predict_mse: length mismatch");
  for (int i = 0; i < k; ++i)
    if (!(m[i] > 0.0))
      throw std::invalid_argument("predict_mse: zero or negative count m[" +
                                  std::to_string(i) + "]");
  const double s1 = stats.sigma[0];
  double e = s1 * s1 / m[0];
  for (int i = 1; i < k; ++i) {
    const double a = alpha[i - 1];
    const double si = stats.sigma[i];
    e += (1.0 / m[i - 1] - 1.0 / m[i]) *
         (a * a * si * si - 2.0 * a * si * s1 * stats.rho1[i]);
  }
  return e;
}

inline double predict_mse(const SamplingPlan& plan,
                          const EnsembleStatistics& stats) {
  return predict_mse(plan.m.cast<double>(), plan.alpha, stats);
}

namespace detail {

inline SamplingPlan finalize_plan(const EnsembleStatistics& stats,
                                  Eigen::VectorXi m, double budget,
                                  Method method) {
  SamplingPlan plan;
  plan.m = std::move(m);
  plan.alpha = control_variate_weights(stats);
  plan.budget = budget;
  plan.method = method;
  plan.realized_cost = plan.m.cast<double>().dot(stats.costs);
  plan.predicted_mse = predict_mse(plan, stats);
  for (int i = 1; i < plan.k(); ++i)
    if (plan.m[i] < plan.m[i - 1])
      throw std::logic_error("allocation produced a decreasing count vector");
  if (plan.m[0] < 1) throw std::logic_error("allocation produced m_1 < 1");
  return plan;
}

}  // namespace detail

// Budget-preserving allocation: solve the relaxation, pin counts below one
// at exactly 1 (front to back, re-solving the suffix each time), then floor
// the remaining free components. The realized cost never exceeds the budget.
inline SamplingPlan allocate_modified(const EnsembleStatistics& stats,
                                      double budget) {
  require_admissible(stats);
  const int k = stats.k();
  if (budget < stats.costs.sum())
    throw std::invalid_argument(
        "allocate_modified: budget " + std::to_string(budget) +
        " is below the minimum feasible cost " + std::to_string(stats.costs.sum()));

  RelaxedSolution sol = solve_relaxed(stats, budget, 0);
  int pinned = 0;
  while (true) {
    int first_low = -1;
    for (int i = pinned; i < k - 1; ++i)
      if (sol.m[i] < 1.0) {
        first_low = i;
        break;
      }
    if (first_low < 0) break;
    pinned = first_low + 1;
    sol = solve_relaxed(stats, budget, pinned);
  }

  Eigen::VectorXi m(k);
  for (int i = 0; i < k; ++i)
    m[i] = i < pinned ? 1 : static_cast<int>(std::floor(sol.m[i]));
  if (m[k - 1] < 1)
    throw std::logic_error(
        "allocate_modified: last count fell below 1 despite p >= sum(w)");
  return detail::finalize_plan(stats, std::move(m), budget, Method::modified);
}

// Baseline rounding of the unpinned relaxed solution: floor counts >= 1,
// ceil counts < 1. The realized cost may exceed the budget; it is recorded
// as-is.
inline SamplingPlan allocate_naive_rounded(const EnsembleStatistics& stats,
                                           double budget) {
  RelaxedSolution sol = solve_relaxed(stats, budget, 0);
  const int k = stats.k();
  Eigen::VectorXi m(k);
  for (int i = 0; i < k; ++i)
    m[i] = static_cast<int>(sol.m[i] >= 1.0 ? std::floor(sol.m[i])
                                            : std::ceil(sol.m[i]));
  return detail::finalize_plan(stats, std::move(m), budget,
                               Method::naive_rounded);
}

// Plain Monte Carlo plan on the high-fidelity model: n = floor(p / w_1).
inline SamplingPlan allocate_mc(const EnsembleStatistics& stats, double budget) {
  stats.validate();
  const int n = static_cast<int>(std::floor(budget / stats.costs[0]));
  if (n < 1)
    throw std::invalid_argument("allocate_mc: budget below one f1 evaluation");
  SamplingPlan plan;
  plan.m = Eigen::VectorXi::Constant(1, n);
  plan.alpha.resize(0);
  plan.budget = budget;
  plan.method = Method::mc;
  plan.realized_cost = n * stats.costs[0];
  const double s1 = stats.sigma[0];
  plan.predicted_mse = s1 * s1 / n;
  return plan;
}

// sqrt(e(MFMC)/e(MC)) at equal relaxed budget:
//   sum_i sqrt((w_i / w_1)(rho_{1,i}^2 - rho_{1,i+1}^2)).
// A value below 1 means the multifidelity estimator wins.
inline double variance_ratio(const EnsembleStatistics& stats) {
  require_admissible(stats);
  const int k = stats.k();
  auto rho2 = [&](int i) { return i < k ? stats.rho1[i] * stats.rho1[i] : 0.0; };
  double s = 0.0;
  for (int i = 0; i < k; ++i)
    s += std::sqrt(stats.costs[i] / stats.costs[0] * (rho2(i) - rho2(i + 1)));
  return s;
}

// Exhaustive integer search over nondecreasing count vectors within the
// budget, with weights fixed at alpha*. Test oracle; intended for k <= 4.
// Exact-value ties resolve to the lexicographically smallest vector.
inline SamplingPlan brute_force_mip(const EnsembleStatistics& stats,
                                    double budget, int cap) {
  stats.validate();
  const int k = stats.k();
  if (cap < 1) throw std::invalid_argument("brute_force_mip: cap must be >= 1");
  const Eigen::VectorXd alpha = control_variate_weights(stats);

  Eigen::VectorXi m(k), best(k);
  double best_mse = std::numeric_limits<double>::infinity();
  bool found = false;

  const std::function<void(int, int, double)> recurse = [&](int i, int lo,
                                                            double spent) {
    if (i == k) {
      const double e = predict_mse(m.cast<double>(), alpha, stats);
      if (e < best_mse) {
        best_mse = e;
        best = m;
        found = true;
      }
      return;
    }
    for (int v = lo; v <= cap; ++v) {
      const double c = spent + v * stats.costs[i];
      if (c > budget) break;
      m[i] = v;
      recurse(i + 1, v, c);
    }
  };
  recurse(0, 1, 0.0);

  if (!found)
    throw std::runtime_error("brute_force_mip: no feasible count vector");
  SamplingPlan plan;
  plan.m = best;
  plan.alpha = alpha;
  plan.budget = budget;
  plan.method = Method::modified;
  plan.realized_cost = best.cast<double>().dot(stats.costs);
  plan.predicted_mse = best_mse;
  return plan;
}

}  // namespace mfmc
