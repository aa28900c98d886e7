#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfmc/serialization.hpp"

using namespace mfmc;

TEST_CASE("experiment config round-trips through JSON") {
  ExperimentConfig c;
  c.benchmark = "burgers";
  c.pilot_size = 123;
  c.budgets_over_w1 = {2, 7.5, 64};
  c.n_runs = 17;
  c.reference_samples = 4242;
  c.master_seed = 99;
  c.output_dir = "/tmp/out";
  c.lognormal_moments = true;
  c.z2_range = {2e-4, 2.75e-2};
  c.methods = {"modified", "mc"};
  c.stats_source = "paper";
  c.subset_override = std::vector<int>{0, 3, 1};
  c.emit_plot_data = true;

  const auto back = config_from_json(config_to_json(c));
  CHECK(back.benchmark == c.benchmark);
  CHECK(back.pilot_size == c.pilot_size);
  CHECK(back.budgets_over_w1 == c.budgets_over_w1);
  CHECK(back.n_runs == c.n_runs);
  CHECK(back.reference_samples == c.reference_samples);
  CHECK(back.master_seed == c.master_seed);
  CHECK(back.output_dir == c.output_dir);
  CHECK(back.lognormal_moments == c.lognormal_moments);
  REQUIRE(back.z2_range.has_value());
  CHECK(back.z2_range->first == c.z2_range->first);
  CHECK(back.z2_range->second == c.z2_range->second);
  CHECK(back.methods == c.methods);
  CHECK(back.stats_source == c.stats_source);
  REQUIRE(back.subset_override.has_value());
  CHECK(*back.subset_override == *c.subset_override);
  CHECK(back.emit_plot_data == c.emit_plot_data);
}

TEST_CASE("an empty JSON object yields the defaults") {
  const auto c = config_from_json(json::object());
  CHECK(c.benchmark == "short-column");
  CHECK(c.pilot_size == 1000);
  CHECK(c.budgets_over_w1 == std::vector<double>{2, 4, 8, 16, 32, 64});
  CHECK(c.n_runs == 1000);
  CHECK(c.master_seed == 2022);
  CHECK_FALSE(c.z2_range.has_value());
  CHECK_FALSE(c.subset_override.has_value());
  CHECK(c.stats_source == "pilot");
}

TEST_CASE("invalid configurations are rejected with clear messages") {
  CHECK_THROWS_WITH_AS(config_from_json(json{{"benchmark", "heat"}}),
                       doctest::Contains("unknown benchmark"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(config_from_json(json{{"budgets_over_w1", {2.0, -1.0}}}),
                       doctest::Contains("positive"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json{{"stats_source", "guess"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json{{"methods", {"modified", "bogus"}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json{{"z2_range", {1.0}}}),
                  std::invalid_argument);
}

TEST_CASE("config files load by path and report parse errors with the path") {
  const std::string path = "test_config_tmp.json";
  {
    std::ofstream out(path);
    out << R"({"benchmark": "short-column", "n_runs": 3})";
  }
  const auto c = load_config(path);
  CHECK(c.n_runs == 3);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_WITH_AS(load_config(path), doctest::Contains(path.c_str()),
                       std::runtime_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("no_such_file.json"), std::runtime_error);
}

TEST_CASE("statistics and plans round-trip through JSON") {
  EnsembleStatistics stats;
  stats.sigma = Eigen::Vector3d(1.25, 0.5, 0.75);
  stats.rho1 = Eigen::Vector3d(1.0, 0.99, 0.9);
  stats.costs = Eigen::Vector3d(10.0, 2.0, 1.0);
  stats.pilot_count = 321;
  const auto s2 = stats_from_json(stats_to_json(stats));
  CHECK(s2.sigma == stats.sigma);
  CHECK(s2.rho1 == stats.rho1);
  CHECK(s2.costs == stats.costs);
  CHECK(s2.pilot_count == 321);

  SamplingPlan plan;
  plan.m = Eigen::Vector3i(2, 17, 1059);
  plan.alpha = Eigen::Vector2d(1.1, 0.9);
  plan.predicted_mse = 1.5e-6;
  plan.realized_cost = 634.5;
  plan.budget = 640.0;
  plan.method = Method::naive_rounded;
  const auto p2 = plan_from_json(plan_to_json(plan));
  CHECK(p2.m == plan.m);
  CHECK(p2.alpha == plan.alpha);
  CHECK(p2.predicted_mse == plan.predicted_mse);
  CHECK(p2.realized_cost == plan.realized_cost);
  CHECK(p2.budget == plan.budget);
  CHECK(p2.method == Method::naive_rounded);
}

TEST_CASE("method names map both ways") {
  CHECK(method_from_name("mc") == Method::mc);
  CHECK(method_from_name("modified") == Method::modified);
  CHECK(method_from_name("naive-rounded") == Method::naive_rounded);
  CHECK(method_from_name(method_name(Method::modified)) == Method::modified);
  CHECK_THROWS_AS(method_from_name("simplex"), std::invalid_argument);
}

TEST_CASE("results CSV has the documented header and row shapes") {
  ExperimentResult result;
  result.y_ref = 0.25;
  result.reference_samples = 100;
  result.master_seed = 7;

  EstimateReport ok;
  ok.budget = 20.0;
  ok.budget_over_w1 = 2.0;
  ok.method = Method::modified;
  ok.m = Eigen::Vector3i(1, 1, 10);
  ok.effective_budget = 2.0;
  ok.estimate_mean = 0.251;
  ok.empirical_mse = 4e-6;
  ok.relative_mse = 6.4e-5;
  result.rows.push_back(ok);

  EstimateReport mc_row = ok;
  mc_row.method = Method::mc;
  mc_row.m = Eigen::VectorXi::Constant(1, 2);
  result.rows.push_back(mc_row);

  EstimateReport bad;
  bad.budget = 5.0;
  bad.budget_over_w1 = 0.5;
  bad.method = Method::modified;
  bad.feasible = false;
  bad.note = "infeasible";
  result.rows.push_back(bad);

  std::ostringstream os;
  write_results_csv(os, result, 3);
  std::istringstream lines(os.str());
  std::string header, row_ok, row_mc, row_bad;
  std::getline(lines, header);
  std::getline(lines, row_ok);
  std::getline(lines, row_mc);
  std::getline(lines, row_bad);

  CHECK(header ==
        "budget_over_w1, method, m_1, m_2, m_3, effective_budget, rel_mse, "
        "mse, est_mean");
  CHECK(row_ok.rfind("2, modified, 1, 1, 10, 2, ", 0) == 0);
  // MC rows pad the unused count columns with zeros
  CHECK(row_mc.rfind("2, mc, 2, 0, 0, ", 0) == 0);
  // infeasible rows keep budget and method, then empty fields
  CHECK(row_bad == "0.5, modified, , , , , , , ");

  // every row has the same number of separators as the header
  const auto commas = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  CHECK(commas(row_ok) == commas(header));
  CHECK(commas(row_mc) == commas(header));
  CHECK(commas(row_bad) == commas(header));
}

TEST_CASE("result JSON sidecar keeps per-run values and metadata") {
  ExperimentResult result;
  result.y_ref = 1.5;
  result.reference_samples = 10;
  result.master_seed = 3;
  EstimateReport row;
  row.budget_over_w1 = 4.0;
  row.method = Method::modified;
  row.m = Eigen::Vector2i(1, 5);
  row.per_run = {1.4, 1.6};
  result.rows.push_back(row);

  const json j = result_to_json(result);
  CHECK(j.at("y_ref") == 1.5);
  CHECK(j.at("master_seed") == 3);
  REQUIRE(j.at("rows").size() == 1);
  CHECK(j.at("rows")[0].at("per_run").size() == 2);
  const json lean = result_to_json(result, false);
  CHECK_FALSE(lean.at("rows")[0].contains("per_run"));
}
