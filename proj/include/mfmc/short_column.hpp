#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfmc/model.hpp"
#include "mfmc/random.hpp"

namespace mfmc {

// Analytic short-column limit-state ensemble: rectangular cross section under
// bending and axial force. Model 1 is the high-fidelity limit state; the
// four surrogates perturb the bending term and the axial-force term.
namespace short_column {

// model_index is 1-based (f1..f5).
inline double eval(int model_index, const Eigen::VectorXd& z) {
  if (z.size() != 5)
    throw std::invalid_argument("short_column: input must have dimension 5");
  const double z1 = z[0], z2 = z[1], z3 = z[2], z4 = z[3], z5 = z[4];
  if (z1 == 0.0 || z2 == 0.0 || z3 == 0.0)
    throw std::domain_error("short_column: z1, z2, z3 must be nonzero");
  const double bend = z1 * z2 * z2 * z3;  // z1 z2^2 z3
  const double axial = z1 * z2 * z3;
  switch (model_index) {
    case 1: {
      const double t = z5 / axial;
      return 1.0 - 4.0 * z4 / bend - t * t;
    }
    case 2: {
      const double t = z5 * (1.0 + (z4 - 2000.0) / 4000.0) / axial;
      return 1.0 - 3.8 * z4 / bend - t * t;
    }
    case 3: {
      const double t = z5 * (1.0 + z4) / (z2 * z3);
      return 1.0 - z4 / bend - t * t;
    }
    case 4: {
      const double t = z5 * (1.0 + z4) / axial;
      return 1.0 - z4 / bend - t * t;
    }
    case 5: {
      const double t = z5 / axial;
      return 1.0 - z4 / bend - t * t;
    }
    default:
      throw std::out_of_range("short_column: model index must be in 1..5");
  }
}

// Width and depth uniform, yield stress lognormal, bending moment and axial
// force normal. The lognormal (5, 0.5) defaults to the parameters of the
// underlying normal; set moments_of_lognormal for the alternative reading.
inline RandomInputSpec input_spec(bool moments_of_lognormal = false) {
  RandomInputSpec spec;
  spec.coords = {
      uniform_dist(5.0, 15.0),
      uniform_dist(15.0, 25.0),
      lognormal_dist(5.0, 0.5, moments_of_lognormal),
      normal_dist(2000.0, 400.0),
      normal_dist(500.0, 100.0),
  };
  return spec;
}

inline Eigen::VectorXd nominal_costs() {
  Eigen::VectorXd w(5);
  w << 100.0, 50.0, 20.0, 10.0, 5.0;
  return w;
}

// Correlations with f1 as published for this benchmark (1000-sample pilot).
inline Eigen::VectorXd published_rho1() {
  Eigen::VectorXd rho(5);
  rho << 1.0, 0.99994645, 0.6980721, 0.92928154, 0.99863737;
  return rho;
}

inline std::vector<Model> models(bool moments_of_lognormal = false) {
  (void)moments_of_lognormal;
  const Eigen::VectorXd w = nominal_costs();
  std::vector<Model> out;
  out.reserve(5);
  for (int i = 1; i <= 5; ++i)
    out.emplace_back("f" + std::to_string(i),
                     [i](const Eigen::VectorXd& z) { return eval(i, z); },
                     w[i - 1]);
  return out;
}

}  // namespace short_column
}  // namespace mfmc
