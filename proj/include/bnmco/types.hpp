#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bnmco {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;

/// A D-dimensional joint vector.
using Configuration = Eigen::VectorXd;

/// Cost value for infeasible states. Sums and positive scalings keep it
/// infinite and exp(-rho * kInfiniteCost) evaluates to 0.
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

inline bool is_infinite_cost(double c) { return std::isinf(c) && c > 0; }

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every sample of a batch carries zero density mass.
class DegenerateBatch : public Error {
 public:
  using Error::Error;
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(got) +
                                " does not match expected " + std::to_string(want));
  }
}

}  // namespace bnmco
