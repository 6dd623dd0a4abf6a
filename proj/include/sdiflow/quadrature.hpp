#pragma once

#include <functional>

#include "sdiflow/common.hpp"

namespace sdiflow {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // accumulated local panel-difference estimates
  long panels = 0;
};

/// Composite Gauss-Legendre with interval halving. A panel is accepted when
/// its value agrees with the sum over its halves to rel_tol (relative to the
/// running total). Throws QuadratureError when the panel budget is exhausted.
QuadratureResult adaptive_gauss_legendre(const std::function<double(double)>& f, double a,
                                         double b, double rel_tol = 1e-9,
                                         long max_panels = 1L << 20);

/// Single fixed-order Gauss-Legendre panel (15 nodes).
double gauss_legendre_panel(const std::function<double(double)>& f, double a, double b);

}  // namespace sdiflow
