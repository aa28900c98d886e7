#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mfmc {

// splitmix64 finalizer, used to derive well-separated substream seeds
// from a single master seed plus a list of stream identifiers.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = mix64(master);
  for (auto id : ids) s = mix64(s ^ mix64(id));
  return s;
}

inline std::mt19937_64 make_rng(std::uint64_t master,
                                std::initializer_list<std::uint64_t> ids = {}) {
  return std::mt19937_64(derive_seed(master, ids));
}

enum class DistKind { uniform, normal, lognormal };

// One coordinate of the random input vector.
//   uniform:    p1 = lower bound, p2 = upper bound
//   normal:     p1 = mean, p2 = standard deviation
//   lognormal:  by default p1, p2 are mean/stddev of the underlying normal
//               (ln z ~ N(p1, p2^2)); with moments_of_lognormal set they are
//               interpreted as mean/stddev of the lognormal variable itself.
struct CoordinateDist {
  DistKind kind = DistKind::uniform;
  double p1 = 0.0;
  double p2 = 1.0;
  bool moments_of_lognormal = false;
};

inline CoordinateDist uniform_dist(double a, double b) {
  return {DistKind::uniform, a, b, false};
}
inline CoordinateDist normal_dist(double mean, double stddev) {
  return {DistKind::normal, mean, stddev, false};
}
inline CoordinateDist lognormal_dist(double p1, double p2,
                                     bool moments_of_lognormal = false) {
  return {DistKind::lognormal, p1, p2, moments_of_lognormal};
}

struct RandomInputSpec {
  std::vector<CoordinateDist> coords;

  int dimension() const { return static_cast<int>(coords.size()); }

  void validate() const {
    if (coords.empty())
      throw std::invalid_argument("RandomInputSpec: dimension must be >= 1");
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto& c = coords[i];
      if (c.kind == DistKind::uniform && !(c.p1 < c.p2))
        throw std::invalid_argument(
            "RandomInputSpec: uniform bounds must satisfy a < b at coordinate " +
            std::to_string(i));
      if (c.kind != DistKind::uniform && !(c.p2 > 0.0))
        throw std::invalid_argument(
            "RandomInputSpec: scale parameter must be positive at coordinate " +
            std::to_string(i));
    }
  }
};

// Parameters (mu, sigma) of the underlying normal for a lognormal coordinate.
inline std::pair<double, double> lognormal_underlying(const CoordinateDist& c) {
  if (!c.moments_of_lognormal) return {c.p1, c.p2};
  const double m = c.p1, v = c.p2 * c.p2;
  if (!(m > 0.0))
    throw std::invalid_argument("lognormal moment parameterization needs mean > 0");
  const double s2 = std::log1p(v / (m * m));
  return {std::log(m) - 0.5 * s2, std::sqrt(s2)};
}

inline double draw_coordinate(const CoordinateDist& c, std::mt19937_64& rng) {
  switch (c.kind) {
    case DistKind::uniform:
      return std::uniform_real_distribution<double>(c.p1, c.p2)(rng);
    case DistKind::normal:
      return std::normal_distribution<double>(c.p1, c.p2)(rng);
    case DistKind::lognormal: {
      auto [mu, sig] = lognormal_underlying(c);
      return std::exp(std::normal_distribution<double>(mu, sig)(rng));
    }
  }
  throw std::logic_error("unreachable distribution kind");
}

inline Eigen::VectorXd draw_input(const RandomInputSpec& spec,
                                  std::mt19937_64& rng) {
  Eigen::VectorXd z(spec.dimension());
  for (int i = 0; i < spec.dimension(); ++i)
    z[i] = draw_coordinate(spec.coords[static_cast<std::size_t>(i)], rng);
  return z;
}

}  // namespace mfmc
