#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace sdiflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Violated precondition or malformed argument (dimension mismatch, bad range).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A sample path left the admissible region (overflow / NaN state).
struct DivergenceError : std::runtime_error {
  DivergenceError(double t_, double norm_)
      : std::runtime_error("trajectory diverged at t=" + std::to_string(t_) +
                           ", |x|=" + std::to_string(norm_)),
        t(t_),
        state_norm(norm_) {}
  double t;
  double state_norm;
};

/// Iterative solver hit its iteration cap before reaching tolerance.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& what, double residual_)
      : std::runtime_error(what + " (final residual " + std::to_string(residual_) + ")"),
        residual(residual_) {}
  double residual;
};

/// Adaptive quadrature failed to converge within the refinement budget.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved_)
      : std::runtime_error(what), achieved(achieved_) {}
  double achieved;
};

/// Log-log fit could not be performed (empty window, nonpositive values).
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

inline void require_dim(const Vec& x, Eigen::Index dim, const std::string& who) {
  if (x.size() != dim)
    throw ContractViolation(who + ": dimension mismatch, got " + std::to_string(x.size()) +
                            " expected " + std::to_string(dim));
}

}  // namespace sdiflow
