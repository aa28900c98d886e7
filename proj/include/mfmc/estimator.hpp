#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfmc/allocation.hpp"
#include "mfmc/model.hpp"
#include "mfmc/random.hpp"
#include "mfmc/statistics.hpp"

namespace mfmc {

struct EstimateOutcome {
  double value = 0.0;
  double cost = 0.0;  // sum of w_i m_i over the models actually evaluated
};

namespace detail {

inline double checked_eval(const Model& model, const Eigen::VectorXd& z,
                           long sample_index) {
  double y;
  try {
    y = model(z);
  } catch (const std::exception& e) {
    throw std::runtime_error("estimate: model '" + model.id +
                             "' failed at sample " +
                             std::to_string(sample_index) + ": " + e.what());
  }
  if (!std::isfinite(y))
    throw std::runtime_error("estimate: model '" + model.id +
                             "' produced a non-finite value at sample " +
                             std::to_string(sample_index));
  return y;
}

}  // namespace detail

// One draw of the multifidelity estimator. m_k realizations are drawn; model i
// sees exactly the first m_i of them, so the cheap-model means share their
// prefix samples with the expensive ones:
//   y = ybar^1_{m_1} + sum_{i>=2} alpha_i (ybar^i_{m_i} - ybar^i_{m_{i-1}})
inline EstimateOutcome mfmc_estimate(const std::vector<Model>& models,
                                     const SamplingPlan& plan,
                                     const RandomInputSpec& input_spec,
                                     std::uint64_t seed) {
  const int k = plan.k();
  if (static_cast<int>(models.size()) != k)
    throw std::invalid_argument("mfmc_estimate: plan/model count mismatch");
  input_spec.validate();
  for (int i = 1; i < k; ++i)
    if (plan.m[i] < plan.m[i - 1])
      throw std::invalid_argument("mfmc_estimate: plan counts must be nondecreasing");
  if (plan.m[0] < 1)
    throw std::invalid_argument("mfmc_estimate: plan must have m_1 >= 1");

  auto rng = make_rng(seed);
  const int m_last = plan.m[k - 1];

  // Running sums per model; model i stops accumulating after its m_i samples.
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd prefix_means(k);  // ybar^i_{m_i}
  std::vector<double> sub_means(k);  // ybar^i_{m_{i-1}} for i >= 1
  for (long j = 0; j < m_last; ++j) {
    const Eigen::VectorXd z = draw_input(input_spec, rng);
    for (int i = 0; i < k; ++i) {
      if (j < plan.m[i]) sums[i] += detail::checked_eval(models[i], z, j);
      if (i > 0 && j + 1 == plan.m[i - 1]) sub_means[i] = sums[i] / plan.m[i - 1];
      if (j + 1 == plan.m[i]) prefix_means[i] = sums[i] / plan.m[i];
    }
  }

  EstimateOutcome out;
  out.value = prefix_means[0];
  for (int i = 1; i < k; ++i)
    out.value += plan.alpha[i - 1] * (prefix_means[i] - sub_means[i]);
  for (int i = 0; i < k; ++i)
    out.cost += plan.m[i] * models[static_cast<std::size_t>(i)].cost;
  return out;
}

// Plain Monte Carlo mean of n i.i.d. evaluations.
inline double mc_estimate(const Model& model, long n,
                          const RandomInputSpec& input_spec,
                          std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("mc_estimate: n must be >= 1");
  input_spec.validate();
  auto rng = make_rng(seed);
  double sum = 0.0;
  for (long j = 0; j < n; ++j)
    sum += detail::checked_eval(model, draw_input(input_spec, rng), j);
  return sum / static_cast<double>(n);
}

struct EstimateReport {
  double budget = 0.0;
  double budget_over_w1 = 0.0;
  Method method = Method::mc;
  Eigen::VectorXi m;                 // per-model counts of the plan
  double effective_budget = 0.0;     // realized cost / w_1
  double estimate_mean = 0.0;        // ybar over the runs
  std::vector<double> per_run;
  double empirical_mse = 0.0;        // (1/N) sum (y_j - y_ref)^2
  double relative_mse = 0.0;         // empirical_mse / y_ref^2
  double reference = 0.0;
  double realized_cost_per_run = 0.0;
  std::uint64_t master_seed = 0;
  bool feasible = true;
  std::string note;
};

struct ExperimentResult {
  double y_ref = 0.0;
  long reference_samples = 0;
  std::uint64_t master_seed = 0;
  std::vector<EstimateReport> rows;  // ordered by (budget, method)
};

// Repeated-trial experiment over a budget grid. The reference value is one
// MC mean over `reference_samples` draws of the high-fidelity model, on a
// stream independent of every run; run j of (method, budget b) uses the
// substream (master_seed, method id, b, j).
inline ExperimentResult run_experiment(const std::vector<Model>& models,
                                       const EnsembleStatistics& stats,
                                       const RandomInputSpec& input_spec,
                                       const std::vector<double>& budgets,
                                       int n_runs, long reference_samples,
                                       std::uint64_t master_seed,
                                       const std::vector<Method>& methods = {
                                           Method::mc, Method::modified,
                                           Method::naive_rounded}) {
  if (models.empty() || static_cast<int>(models.size()) != stats.k())
    throw std::invalid_argument("run_experiment: models/stats mismatch");
  if (n_runs < 1) throw std::invalid_argument("run_experiment: n_runs >= 1");
  if (reference_samples < 1)
    throw std::invalid_argument("run_experiment: reference_samples >= 1");
  const double w1 = stats.costs[0];

  ExperimentResult result;
  result.reference_samples = reference_samples;
  result.master_seed = master_seed;
  result.y_ref = mc_estimate(models[0], reference_samples, input_spec,
                             derive_seed(master_seed, {0x726566ULL}));

  for (std::size_t b = 0; b < budgets.size(); ++b) {
    const double p = budgets[b];
    for (const Method method : methods) {
      EstimateReport row;
      row.budget = p;
      row.budget_over_w1 = p / w1;
      row.method = method;
      row.reference = result.y_ref;
      row.master_seed = master_seed;

      SamplingPlan plan;
      try {
        switch (method) {
          case Method::mc: plan = allocate_mc(stats, p); break;
          case Method::modified: plan = allocate_modified(stats, p); break;
          case Method::naive_rounded:
            plan = allocate_naive_rounded(stats, p);
            break;
        }
      } catch (const std::exception& e) {
        row.feasible = false;
        row.note = e.what();
        result.rows.push_back(std::move(row));
        continue;
      }

      row.m = plan.m;
      row.realized_cost_per_run = plan.realized_cost;
      row.effective_budget = plan.realized_cost / w1;
      row.per_run.reserve(static_cast<std::size_t>(n_runs));
      double sum = 0.0, sq = 0.0;
      for (int j = 0; j < n_runs; ++j) {
        const std::uint64_t run_seed = derive_seed(
            master_seed, {static_cast<std::uint64_t>(method),
                          static_cast<std::uint64_t>(b),
                          static_cast<std::uint64_t>(j)});
        double y;
        if (method == Method::mc) {
          y = mc_estimate(models[0], plan.m[0], input_spec, run_seed);
        } else {
          y = mfmc_estimate(models, plan, input_spec, run_seed).value;
        }
        row.per_run.push_back(y);
        sum += y;
        const double d = y - result.y_ref;
        sq += d * d;
      }
      row.estimate_mean = sum / n_runs;
      row.empirical_mse = sq / n_runs;
      row.relative_mse = row.empirical_mse / (result.y_ref * result.y_ref);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

}  // namespace mfmc
