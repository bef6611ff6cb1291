#pragma once

#include "specflow/box_qp.hpp"
#include "specflow/core.hpp"

#include <string>

namespace specflow {

/// Minimizer v of 1/2 ||v - f||^2 + t J(v) with its dual certificate.
struct VPSolution {
  double t = 0.0;
  Vector v;
  /// q with v - f + t A^T q = 0 and ||q||_inf <= 1 (for the max-norm, ||q||_1 <= 1 and A = I).
  Vector q;
  /// ||v - f + t A^T q||.
  double residual = 0.0;
  /// Primal-dual gap of the returned pair.
  double gap = 0.0;
  int iterations = 0;
  std::string method;
};

struct VpOptions {
  /// Use the generic dual solver even when a closed form exists.
  bool force_generic = false;
  BoxLsqOptions qp;
};

/// Exact 1D total-variation prox: argmin 1/2 ||x - f||^2 + t sum |x_{i+1} - x_i|.
/// Computes the taut string through the tube of half-width t around the cumulative sum.
Vector taut_string_prox(const Vector& f, double t);

/// Prox of t J at f. Closed forms for tv1d, l1 and the max-norm; otherwise the dual
/// problem min_{||y||_inf <= t} 1/2 ||A^T y - f||^2 is solved and v = f - A^T y.
VPSolution vp_solve(const Functional& F, const Vector& f, double t, const VpOptions& opts = {},
                    const Vector* warm_dual = nullptr);

}  // namespace specflow
