// Command-line front end for the multifidelity Monte Carlo library.
//
// Subcommands:
//   pilot       draw a shared pilot sample and estimate (sigma, rho, w)
//   select      exhaustive model-subset search on a stats file
//   allocate    sample-count allocation for one budget and method
//   estimate    one estimator draw from a stored plan
//   experiment  full pipeline: pilot/published stats -> select -> allocate
//               -> repeated runs over a budget grid -> CSV + JSON outputs
//
// Budgets are always given as multiples of the high-fidelity cost w_1.
// All randomness derives from a single master seed; identical invocations
// produce byte-identical outputs. The env var MFMC_OUTPUT_DIR overrides the
// output directory of `experiment`.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfmc/harness.hpp"

namespace fs = std::filesystem;
using mfmc::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("parse error in '" + path + "': " + e.what());
  }
  return j;
}

mfmc::EnsembleStatistics read_stats(const std::string& path) {
  json j = read_json(path);
  if (j.contains("stats")) j = j.at("stats");
  return mfmc::stats_from_json(j);
}

int cmd_pilot(const std::string& benchmark, long n_pilot, std::uint64_t seed,
              bool lognormal_moments, std::optional<std::pair<double, double>> z2,
              const std::string& out_path, const std::string& csv_path) {
  mfmc::ExperimentConfig config;
  config.benchmark = benchmark;
  config.pilot_size = n_pilot;
  config.master_seed = seed;
  config.lognormal_moments = lognormal_moments;
  config.z2_range = z2;
  config.validate();

  const mfmc::Benchmark bench = mfmc::make_benchmark(config);
  const Eigen::MatrixXd pilot =
      mfmc::draw_pilot(bench.models, bench.input, n_pilot,
                       mfmc::derive_seed(seed, {0x7374617473ULL}));
  const auto stats =
      mfmc::estimate_statistics(pilot, bench.published_costs.size()
                                           ? bench.published_costs
                                           : Eigen::VectorXd());

  json j = mfmc::stats_to_json(stats);
  j["benchmark"] = benchmark;
  j["master_seed"] = seed;
  write_text(out_path, j.dump(2) + "\n");
  if (!csv_path.empty()) {
    std::ostringstream os;
    mfmc::write_pilot_csv(os, bench.models, pilot);
    write_text(csv_path, os.str());
  }
  std::cout << "# master_seed = " << seed << "\n" << j.dump(2) << "\n";
  return 0;
}

int cmd_select(const std::string& stats_path, int max_models,
               const std::string& out_path) {
  const auto stats = read_stats(stats_path);
  const auto sel = mfmc::select_models(stats, max_models);
  json j = mfmc::selection_to_json(sel);
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_allocate(const std::string& stats_path, double budget_over_w1,
                 const std::string& method, const std::vector<int>& subset,
                 const std::string& out_path) {
  auto stats = read_stats(stats_path);
  if (!subset.empty()) stats = stats.subset(subset);
  const double p = budget_over_w1 * stats.costs[0];
  mfmc::SamplingPlan plan;
  switch (mfmc::method_from_name(method)) {
    case mfmc::Method::mc: plan = mfmc::allocate_mc(stats, p); break;
    case mfmc::Method::modified: plan = mfmc::allocate_modified(stats, p); break;
    case mfmc::Method::naive_rounded:
      plan = mfmc::allocate_naive_rounded(stats, p);
      break;
  }
  json j = mfmc::plan_to_json(plan);
  j["budget_over_w1"] = budget_over_w1;
  j["effective_budget"] = plan.realized_cost / stats.costs[0];
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_estimate(const std::string& benchmark, const std::string& plan_path,
                 const std::vector<int>& subset, std::uint64_t seed,
                 bool lognormal_moments, const std::string& out_path) {
  mfmc::ExperimentConfig config;
  config.benchmark = benchmark;
  config.master_seed = seed;
  config.lognormal_moments = lognormal_moments;
  const mfmc::Benchmark bench = mfmc::make_benchmark(config);
  const auto plan = mfmc::plan_from_json(read_json(plan_path));

  std::vector<int> indices = subset;
  if (indices.empty())
    for (int i = 0; i < plan.k(); ++i) indices.push_back(i);
  if (static_cast<int>(indices.size()) != plan.k())
    throw std::invalid_argument("estimate: subset size does not match the plan");
  std::vector<mfmc::Model> models;
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(bench.models.size()))
      throw std::invalid_argument("estimate: model index out of range");
    models.push_back(bench.models[static_cast<std::size_t>(i)]);
  }

  json j;
  j["master_seed"] = seed;
  if (plan.method == mfmc::Method::mc) {
    j["value"] = mfmc::mc_estimate(models[0], plan.m[0], bench.input, seed);
    j["cost"] = plan.m[0] * models[0].cost;
  } else {
    const auto est = mfmc::mfmc_estimate(models, plan, bench.input, seed);
    j["value"] = est.value;
    j["cost"] = est.cost;
  }
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir_flag) {
  auto config = mfmc::load_config(config_path);
  std::string out_dir = config.output_dir;
  if (!out_dir_flag.empty()) out_dir = out_dir_flag;
  if (const char* env = std::getenv("MFMC_OUTPUT_DIR")) out_dir = env;
  fs::create_directories(out_dir);

  const auto result = mfmc::run_pipeline(config);
  const int k = static_cast<int>(result.subset.size());

  std::ostringstream csv;
  mfmc::write_results_csv(csv, result.experiment, k);
  write_text((fs::path(out_dir) / "results.csv").string(), csv.str());

  json sidecar = mfmc::result_to_json(result.experiment, config.emit_plot_data);
  sidecar["config"] = mfmc::config_to_json(config);
  sidecar["stats"] = mfmc::stats_to_json(result.full_stats);
  sidecar["selection"] = mfmc::selection_to_json(result.selection);
  sidecar["subset"] = result.subset;
  write_text((fs::path(out_dir) / "results.json").string(),
             sidecar.dump(2) + "\n");

  std::cout << "# master_seed = " << config.master_seed << "\n"
            << "# y_ref = " << result.experiment.y_ref << " ("
            << result.experiment.reference_samples << " samples)\n"
            << "# subset =";
  for (int i : result.subset) std::cout << " f" << (i + 1);
  std::cout << "\n" << csv.str();

  for (const auto& row : result.experiment.rows)
    if (!row.feasible) {
      std::cerr << "error: infeasible row at budget_over_w1 = "
                << row.budget_over_w1 << " (" << mfmc::method_name(row.method)
                << "): " << row.note << "\n";
      return 2;
    }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-preserving multifidelity Monte Carlo toolkit"};
  app.require_subcommand(1);

  // pilot
  std::string benchmark = "short-column";
  long n_pilot = 1000;
  std::uint64_t seed = 2022;
  bool lognormal_moments = false;
  std::vector<double> z2_flags;
  std::string out_path, csv_path;
  auto* pilot = app.add_subcommand("pilot", "Pilot sampling and statistics");
  pilot->add_option("--benchmark", benchmark, "short-column | burgers");
  pilot->add_option("--n-pilot", n_pilot, "number of shared pilot samples");
  pilot->add_option("--seed", seed, "master seed");
  pilot->add_flag("--lognormal-moments", lognormal_moments,
                  "interpret lognormal parameters as mean/sd of the variable");
  pilot->add_option("--z2-range", z2_flags, "forcing-rate range lo hi")
      ->expected(2);
  pilot->add_option("--out", out_path, "stats JSON output path")->required();
  pilot->add_option("--csv", csv_path, "optional pilot matrix CSV path");

  // select
  std::string stats_path;
  int max_models = 20;
  auto* select = app.add_subcommand("select", "Model subset selection");
  select->add_option("--stats", stats_path, "stats JSON path")->required();
  select->add_option("--max-models", max_models, "exhaustive-search cap");
  select->add_option("--out", out_path, "selection JSON output path");

  // allocate
  double budget_over_w1 = 2.0;
  std::string method = "modified";
  std::vector<int> subset;
  auto* allocate = app.add_subcommand("allocate", "Sample-count allocation");
  allocate->add_option("--stats", stats_path, "stats JSON path")->required();
  allocate->add_option("--budget", budget_over_w1, "budget as a multiple of w_1")
      ->required();
  allocate->add_option("--method", method, "mc | modified | naive-rounded");
  allocate->add_option("--subset", subset,
                       "restrict to these model indices before allocating");
  allocate->add_option("--out", out_path, "plan JSON output path");

  // estimate
  std::string plan_path;
  auto* estimate = app.add_subcommand("estimate", "One estimator draw");
  estimate->add_option("--benchmark", benchmark, "short-column | burgers");
  estimate->add_option("--plan", plan_path, "plan JSON path")->required();
  estimate->add_option("--subset", subset,
                       "benchmark model indices matching the plan order");
  estimate->add_option("--seed", seed, "run seed");
  estimate->add_flag("--lognormal-moments", lognormal_moments,
                     "interpret lognormal parameters as mean/sd of the variable");
  estimate->add_option("--out", out_path, "estimate JSON output path");

  // experiment
  std::string config_path, out_dir;
  auto* experiment = app.add_subcommand("experiment", "Full pipeline");
  experiment->add_option("--config", config_path, "config JSON path")->required();
  experiment->add_option("--out-dir", out_dir,
                         "output directory (MFMC_OUTPUT_DIR overrides)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pilot->parsed()) {
      std::optional<std::pair<double, double>> z2;
      if (!z2_flags.empty()) z2 = {z2_flags[0], z2_flags[1]};
      return cmd_pilot(benchmark, n_pilot, seed, lognormal_moments, z2,
                       out_path, csv_path);
    }
    if (select->parsed()) return cmd_select(stats_path, max_models, out_path);
    if (allocate->parsed())
      return cmd_allocate(stats_path, budget_over_w1, method, subset, out_path);
    if (estimate->parsed())
      return cmd_estimate(benchmark, plan_path, subset, seed,
                          lognormal_moments, out_path);
    if (experiment->parsed()) return cmd_experiment(config_path, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
