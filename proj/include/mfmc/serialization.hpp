#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfmc/allocation.hpp"
#include "mfmc/estimator.hpp"
#include "mfmc/selection.hpp"
#include "mfmc/statistics.hpp"

namespace mfmc {

using json = nlohmann::json;

inline json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline json to_json(const Eigen::VectorXi& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<int>(i)] = arr[i].get<double>();
  return v;
}

inline json stats_to_json(const EnsembleStatistics& stats) {
  return json{{"k", stats.k()},
              {"sigma", to_json(stats.sigma)},
              {"rho1", to_json(stats.rho1)},
              {"costs", to_json(stats.costs)},
              {"pilot_count", stats.pilot_count}};
}

inline EnsembleStatistics stats_from_json(const json& j) {
  EnsembleStatistics stats;
  stats.sigma = vector_from_json(j.at("sigma"));
  stats.rho1 = vector_from_json(j.at("rho1"));
  stats.costs = vector_from_json(j.at("costs"));
  stats.pilot_count = j.value("pilot_count", 0L);
  stats.validate();
  return stats;
}

inline json selection_to_json(const SelectionResult& sel) {
  return json{{"selected_indices", sel.indices},
              {"predicted_variance", sel.predicted_variance},
              {"benchmark_budget", sel.benchmark_budget}};
}

inline json plan_to_json(const SamplingPlan& plan) {
  return json{{"method", method_name(plan.method)},
              {"m", to_json(plan.m)},
              {"alpha", to_json(plan.alpha)},
              {"predicted_mse", plan.predicted_mse},
              {"realized_cost", plan.realized_cost},
              {"budget", plan.budget}};
}

inline Method method_from_name(const std::string& name) {
  if (name == "mc") return Method::mc;
  if (name == "modified") return Method::modified;
  if (name == "naive-rounded" || name == "naive") return Method::naive_rounded;
  throw std::invalid_argument("unknown method '" + name + "'");
}

inline SamplingPlan plan_from_json(const json& j) {
  SamplingPlan plan;
  const auto& marr = j.at("m");
  plan.m.resize(marr.size());
  for (std::size_t i = 0; i < marr.size(); ++i)
    plan.m[static_cast<int>(i)] = marr[i].get<int>();
  plan.alpha = vector_from_json(j.at("alpha"));
  plan.predicted_mse = j.value("predicted_mse", 0.0);
  plan.realized_cost = j.value("realized_cost", 0.0);
  plan.budget = j.value("budget", 0.0);
  plan.method = method_from_name(j.value("method", "modified"));
  return plan;
}

// Harness configuration; round-trips losslessly through JSON.
struct ExperimentConfig {
  std::string benchmark = "short-column";  // short-column | burgers | custom-stats
  long pilot_size = 1000;
  std::vector<double> budgets_over_w1 = {2, 4, 8, 16, 32, 64};
  int n_runs = 1000;
  long reference_samples = 1000000;
  std::uint64_t master_seed = 2022;
  std::string output_dir = ".";
  bool lognormal_moments = false;
  std::optional<std::pair<double, double>> z2_range;
  std::vector<std::string> methods = {"mc", "modified", "naive-rounded"};
  std::string stats_source = "pilot";  // pilot | paper
  std::optional<std::vector<int>> subset_override;  // original model indices
  std::string stats_file;  // custom-stats benchmark input
  bool emit_plot_data = false;

  void validate() const {
    if (benchmark != "short-column" && benchmark != "burgers" &&
        benchmark != "custom-stats")
      throw std::invalid_argument("config: unknown benchmark '" + benchmark + "'");
    if (n_runs < 1) throw std::invalid_argument("config: n_runs must be >= 1");
    if (reference_samples < 1)
      throw std::invalid_argument("config: reference_samples must be >= 1");
    if (budgets_over_w1.empty())
      throw std::invalid_argument("config: no budgets given");
    for (double b : budgets_over_w1)
      if (!(b > 0)) throw std::invalid_argument("config: budgets must be positive");
    if (stats_source != "pilot" && stats_source != "paper")
      throw std::invalid_argument("config: stats_source must be pilot or paper");
    for (const auto& m : methods) method_from_name(m);
  }
};

inline json config_to_json(const ExperimentConfig& c) {
  json j{{"benchmark", c.benchmark},
         {"pilot_size", c.pilot_size},
         {"budgets_over_w1", c.budgets_over_w1},
         {"n_runs", c.n_runs},
         {"reference_samples", c.reference_samples},
         {"master_seed", c.master_seed},
         {"output_dir", c.output_dir},
         {"lognormal_moments", c.lognormal_moments},
         {"methods", c.methods},
         {"stats_source", c.stats_source},
         {"emit_plot_data", c.emit_plot_data}};
  if (c.z2_range) j["z2_range"] = {c.z2_range->first, c.z2_range->second};
  if (c.subset_override) j["subset"] = *c.subset_override;
  if (!c.stats_file.empty()) j["stats_file"] = c.stats_file;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.benchmark = j.value("benchmark", c.benchmark);
  c.pilot_size = j.value("pilot_size", c.pilot_size);
  if (j.contains("budgets_over_w1"))
    c.budgets_over_w1 = j.at("budgets_over_w1").get<std::vector<double>>();
  c.n_runs = j.value("n_runs", c.n_runs);
  c.reference_samples = j.value("reference_samples", c.reference_samples);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.lognormal_moments = j.value("lognormal_moments", c.lognormal_moments);
  if (j.contains("z2_range")) {
    const auto r = j.at("z2_range").get<std::vector<double>>();
    if (r.size() != 2)
      throw std::invalid_argument("config: z2_range must have two entries");
    c.z2_range = {r[0], r[1]};
  }
  if (j.contains("methods"))
    c.methods = j.at("methods").get<std::vector<std::string>>();
  c.stats_source = j.value("stats_source", c.stats_source);
  if (j.contains("subset"))
    c.subset_override = j.at("subset").get<std::vector<int>>();
  c.stats_file = j.value("stats_file", c.stats_file);
  c.emit_plot_data = j.value("emit_plot_data", c.emit_plot_data);
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in '" + path + "': " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error("config field error in '" + path + "': " + e.what());
  }
}

namespace detail {

inline std::string full_precision(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

// CSV table of an experiment, one row per (budget, method). The count
// columns m_1..m_k follow the plan ordering; MC rows carry n = floor(p/w1)
// in m_1 and zeros elsewhere. Infeasible rows keep the budget and method and
// leave the numeric fields empty.
inline void write_results_csv(std::ostream& os, const ExperimentResult& result,
                              int k) {
  os << "budget_over_w1, method";
  for (int i = 1; i <= k; ++i) os << ", m_" << i;
  os << ", effective_budget, rel_mse, mse, est_mean\n";
  for (const auto& row : result.rows) {
    os << detail::full_precision(row.budget_over_w1) << ", "
       << method_name(row.method);
    if (!row.feasible) {
      for (int i = 0; i < k + 4; ++i) os << ", ";
      os << "\n";
      continue;
    }
    for (int i = 0; i < k; ++i)
      os << ", " << (i < row.m.size() ? row.m[i] : 0);
    os << ", " << detail::full_precision(row.effective_budget) << ", "
       << detail::full_precision(row.relative_mse) << ", "
       << detail::full_precision(row.empirical_mse) << ", "
       << detail::full_precision(row.estimate_mean) << "\n";
  }
}

// JSON sidecar with the raw per-run values and run metadata.
inline json result_to_json(const ExperimentResult& result,
                           bool include_per_run = true) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r{{"budget_over_w1", row.budget_over_w1},
           {"budget", row.budget},
           {"method", method_name(row.method)},
           {"feasible", row.feasible}};
    if (row.feasible) {
      r["m"] = to_json(row.m);
      r["effective_budget"] = row.effective_budget;
      r["rel_mse"] = row.relative_mse;
      r["mse"] = row.empirical_mse;
      r["est_mean"] = row.estimate_mean;
      r["realized_cost_per_run"] = row.realized_cost_per_run;
      if (include_per_run) r["per_run"] = row.per_run;
    } else {
      r["note"] = row.note;
    }
    rows.push_back(std::move(r));
  }
  return json{{"y_ref", result.y_ref},
              {"reference_samples", result.reference_samples},
              {"master_seed", result.master_seed},
              {"rows", std::move(rows)}};
}

}  // namespace mfmc
