#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfmc/model.hpp"
#include "mfmc/random.hpp"

namespace mfmc {

// Per-model standard deviations, correlations with the high-fidelity model,
// and evaluation costs. Model 0 is the high-fidelity model throughout.
struct EnsembleStatistics {
  Eigen::VectorXd sigma;  // sigma_i > 0
  Eigen::VectorXd rho1;   // rho1[0] == 1, |rho1[i]| <= 1
  Eigen::VectorXd costs;  // w_i > 0
  long pilot_count = 0;

  int k() const { return static_cast<int>(sigma.size()); }

  void validate() const {
    if (sigma.size() == 0) throw std::invalid_argument("EnsembleStatistics: empty");
    if (rho1.size() != sigma.size() || costs.size() != sigma.size())
      throw std::invalid_argument("EnsembleStatistics: vector length mismatch");
    if (rho1[0] != 1.0)
      throw std::invalid_argument("EnsembleStatistics: rho1[0] must be 1");
    for (int i = 0; i < k(); ++i) {
      if (!(sigma[i] > 0.0))
        throw std::invalid_argument("EnsembleStatistics: sigma[" +
                                    std::to_string(i) + "] must be positive");
      if (!(std::abs(rho1[i]) <= 1.0))
        throw std::invalid_argument("EnsembleStatistics: |rho1[" +
                                    std::to_string(i) + "]| must be <= 1");
      if (!(costs[i] > 0.0))
        throw std::invalid_argument("EnsembleStatistics: costs[" +
                                    std::to_string(i) + "] must be positive");
    }
  }

  // Restriction to a model subset, in the given order.
  EnsembleStatistics subset(const std::vector<int>& indices) const {
    EnsembleStatistics out;
    const int n = static_cast<int>(indices.size());
    out.sigma.resize(n);
    out.rho1.resize(n);
    out.costs.resize(n);
    out.pilot_count = pilot_count;
    for (int j = 0; j < n; ++j) {
      const int i = indices[static_cast<std::size_t>(j)];
      if (i < 0 || i >= k())
        throw std::out_of_range("EnsembleStatistics::subset: index out of range");
      out.sigma[j] = sigma[i];
      out.rho1[j] = rho1[i];
      out.costs[j] = costs[i];
    }
    return out;
  }
};

// Evaluate all models on n_pilot shared i.i.d. realizations of Z.
// Row j holds every model evaluated at the same z_j.
inline Eigen::MatrixXd draw_pilot(const std::vector<Model>& models,
                                  const RandomInputSpec& input_spec,
                                  long n_pilot, std::uint64_t seed) {
  if (models.empty()) throw std::invalid_argument("draw_pilot: no models");
  if (n_pilot < 2) throw std::invalid_argument("draw_pilot: n_pilot must be >= 2");
  input_spec.validate();

  const int k = static_cast<int>(models.size());
  Eigen::MatrixXd pilot(n_pilot, k);
  auto rng = make_rng(seed, {0x70696c6f74ULL});  // pilot stream
  for (long j = 0; j < n_pilot; ++j) {
    const Eigen::VectorXd z = draw_input(input_spec, rng);
    for (int i = 0; i < k; ++i) {
      double y;
      try {
        y = models[static_cast<std::size_t>(i)](z);
      } catch (const std::exception& e) {
        throw std::runtime_error("draw_pilot: model '" +
                                 models[static_cast<std::size_t>(i)].id +
                                 "' failed at sample " + std::to_string(j) +
                                 ": " + e.what());
      }
      if (!std::isfinite(y))
        throw std::runtime_error("draw_pilot: model '" +
                                 models[static_cast<std::size_t>(i)].id +
                                 "' produced a non-finite value at sample " +
                                 std::to_string(j));
      pilot(j, i) = y;
    }
  }
  return pilot;
}

// Sample standard deviations (divisor n-1) and Pearson correlations of each
// column with column 0. rho1[0] is set to 1 exactly.
inline EnsembleStatistics estimate_statistics(const Eigen::MatrixXd& pilot,
                                              const Eigen::VectorXd& costs) {
  const long n = pilot.rows();
  const int k = static_cast<int>(pilot.cols());
  if (n < 2) throw std::invalid_argument("estimate_statistics: need >= 2 rows");
  if (costs.size() != k)
    throw std::invalid_argument("estimate_statistics: cost vector length mismatch");
  if (!pilot.allFinite())
    throw std::invalid_argument("estimate_statistics: non-finite pilot entry");

  const Eigen::RowVectorXd mean = pilot.colwise().mean();
  const Eigen::MatrixXd centered = pilot.rowwise() - mean;

  EnsembleStatistics stats;
  stats.sigma.resize(k);
  stats.rho1.resize(k);
  stats.costs = costs;
  stats.pilot_count = n;

  Eigen::VectorXd ss(k);
  for (int i = 0; i < k; ++i) {
    ss[i] = centered.col(i).squaredNorm();
    if (!(ss[i] > 0.0))
      throw std::runtime_error(
          "estimate_statistics: zero-variance column " + std::to_string(i) +
          " (correlation with the high-fidelity model is undefined)");
    stats.sigma[i] = std::sqrt(ss[i] / static_cast<double>(n - 1));
  }
  stats.rho1[0] = 1.0;
  for (int i = 1; i < k; ++i)
    stats.rho1[i] = centered.col(0).dot(centered.col(i)) / std::sqrt(ss[0] * ss[i]);
  stats.validate();
  return stats;
}

// CSV dump of a pilot matrix: header = model ids, one row per realization.
inline void write_pilot_csv(std::ostream& os, const std::vector<Model>& models,
                            const Eigen::MatrixXd& pilot) {
  for (std::size_t i = 0; i < models.size(); ++i)
    os << (i ? "," : "") << models[i].id;
  os << "\n";
  const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ",", "\n");
  os << pilot.format(fmt) << "\n";
}

}  // namespace mfmc
