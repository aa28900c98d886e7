#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfmc/statistics.hpp"

namespace mfmc {

struct SelectionResult {
  // Original model indices, high-fidelity model first, then decreasing rho^2.
  std::vector<int> indices;
  double predicted_variance = 0.0;  // v*, in variance units of f^1
  double benchmark_budget = 0.0;    // p used for the prediction
};

namespace detail {

// Squared-correlation ladder of an ordered subset, with rho_{1,k'+1} = 0.
inline std::vector<double> rho2_ladder(const EnsembleStatistics& stats,
                                       const std::vector<int>& ordered) {
  std::vector<double> r2(ordered.size() + 1, 0.0);
  for (std::size_t j = 0; j < ordered.size(); ++j) {
    const double r = stats.rho1[ordered[j]];
    r2[j] = r * r;
  }
  return r2;
}

// Cost-ratio admissibility: w_{i-1}/w_i > (rho2_{i-1} - rho2_i)/(rho2_i - rho2_{i+1}).
// Boundary equality is treated as inadmissible.
inline bool cost_ratio_holds(const EnsembleStatistics& stats,
                             const std::vector<int>& ordered) {
  const auto r2 = rho2_ladder(stats, ordered);
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const double wa = stats.costs[ordered[i - 1]];
    const double wb = stats.costs[ordered[i]];
    if (!(wa / wb > (r2[i - 1] - r2[i]) / (r2[i] - r2[i + 1]))) return false;
  }
  return true;
}

// Predicted estimator variance of an admissible ordered subset at budget p,
// from the closed-form optimum of the relaxed allocation. Equals the MC
// variance sigma_1^2 w_1 / p times the squared ratio
// sum_j sqrt((w_ij / w_1)(rho2_j - rho2_{j+1})).
inline double predicted_subset_variance(const EnsembleStatistics& stats,
                                        const std::vector<int>& ordered,
                                        double p) {
  const auto r2 = rho2_ladder(stats, ordered);
  const double w1 = stats.costs[ordered[0]];
  double s = 0.0;
  for (std::size_t j = 0; j < ordered.size(); ++j)
    s += std::sqrt(stats.costs[ordered[j]] / w1 * (r2[j] - r2[j + 1]));
  const double sigma1 = stats.sigma[ordered[0]];
  return sigma1 * sigma1 * w1 / p * s * s;
}

}  // namespace detail

// Exhaustive search over the 2^(k-1) subsets containing the high-fidelity
// model. Each candidate is reordered by decreasing rho^2, checked against the
// cost-ratio condition, and scored by its predicted estimator variance; the
// admissible minimizer wins. Exact-value ties break toward lower cardinality,
// then lexicographically smaller index lists.
inline SelectionResult select_models(const EnsembleStatistics& stats,
                                     int max_models = 20) {
  stats.validate();
  const int k = stats.k();
  if (k > max_models)
    throw std::invalid_argument("select_models: k = " + std::to_string(k) +
                                " exceeds the exhaustive-search cap of " +
                                std::to_string(max_models));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (stats.rho1[i] * stats.rho1[i] == stats.rho1[j] * stats.rho1[j])
        throw std::invalid_argument(
            "select_models: models " + std::to_string(i) + " and " +
            std::to_string(j) +
            " have equal squared correlation; strict ordering is required");

  const double p = stats.costs[0];  // benchmark budget; the argmin is p-free
  const double sigma1 = stats.sigma[0];

  SelectionResult best;
  best.indices = {0};
  best.predicted_variance = sigma1 * sigma1 * stats.costs[0] / p;
  best.benchmark_budget = p;

  const auto better = [&](double v, const std::vector<int>& idx) {
    if (v != best.predicted_variance) return v < best.predicted_variance;
    if (idx.size() != best.indices.size())
      return idx.size() < best.indices.size();
    return idx < best.indices;
  };

  for (unsigned long mask = 0; mask < (1UL << (k - 1)); ++mask) {
    std::vector<int> subset = {0};
    for (int i = 1; i < k; ++i)
      if (mask >> (i - 1) & 1UL) subset.push_back(i);
    std::sort(subset.begin(), subset.end(), [&](int a, int b) {
      return stats.rho1[a] * stats.rho1[a] > stats.rho1[b] * stats.rho1[b];
    });
    if (!detail::cost_ratio_holds(stats, subset)) continue;
    const double v = detail::predicted_subset_variance(stats, subset, p);
    if (better(v, subset)) {
      best.indices = std::move(subset);
      best.predicted_variance = v;
    }
  }
  return best;
}

}  // namespace mfmc
