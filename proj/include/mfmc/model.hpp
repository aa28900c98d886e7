#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace mfmc {

// A scalar-valued computational model with an abstract evaluation cost.
// The evaluator must be pure: identical input yields identical output.
struct Model {
  std::string id;
  std::function<double(const Eigen::VectorXd&)> eval;
  double cost = 1.0;

  Model() = default;
  Model(std::string id_, std::function<double(const Eigen::VectorXd&)> eval_,
        double cost_)
      : id(std::move(id_)), eval(std::move(eval_)), cost(cost_) {
    if (!(cost > 0.0))
      throw std::invalid_argument("Model '" + id + "': cost must be positive");
  }

  double operator()(const Eigen::VectorXd& z) const { return eval(z); }
};

}  // namespace mfmc
