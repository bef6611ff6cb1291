#pragma once

#include "specflow/core.hpp"

namespace specflow {

struct BoxLsqOptions {
  /// Accelerated projected-gradient iterations run before the active-set polish.
  int max_first_order_iters = 500;
  /// Cap on active-set iterations; 0 selects 20 (k + 10) for k variables.
  int max_active_set_iters = 0;
  /// Stop when the projected gradient norm is below rel_tol (1 + ||c||).
  double rel_tol = 1e-10;
};

struct BoxLsqResult {
  Vector x;
  /// Residual M x - c.
  Vector residual;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves min 1/2 ||M x - c||^2 subject to lo <= x <= hi.
///
/// Accelerated projected gradient with step 1/L (L from power iteration on M^T M)
/// brings x close to the optimum; a primal active-set pass then fixes the face
/// exactly with minimum-norm least-squares steps on the free variables. With a
/// warm start the first-order phase is skipped.
BoxLsqResult solve_box_lsq(const Matrix& m, const Vector& c, const Vector& lo,
                           const Vector& hi, const BoxLsqOptions& opts = {},
                           const Vector* warm_start = nullptr);

/// Norm of the projected gradient of 1/2 ||M x - c||^2 at x.
double projected_gradient_norm(const Matrix& m, const Vector& c, const Vector& lo,
                               const Vector& hi, const Vector& x);

}  // namespace specflow
