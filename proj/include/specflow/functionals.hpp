#pragma once

#include "specflow/core.hpp"

namespace specflow {

/// Forward-difference total variation on a path of n nodes (m = n - 1).
Functional tv1d(Index n);

/// Total variation with zero values outside the n nodes (m = n + 1, trivial kernel).
/// Used for compactly supported data, where the Neumann version would keep a mass term.
Functional tv1d_dirichlet(Index n);

/// J(u) = ||u||_1, A = identity.
Functional l1(Index n);

/// J(u) = max_i |u_i|.
Functional linf(Index n);

/// Discrete divergence of a staggered field u = [u_x, u_y] with 2 nx ny entries.
///
/// Cell c = i + nx j owns its east face u_x(c) and north face u_y(c). Faces on the
/// west and south border carry no flux, so div(c) = u_x(i,j) - u_x(i-1,j) + u_y(i,j) - u_y(i,j-1)
/// with the missing neighbours dropped.
Functional grid_divergence(const GridSpec& g);

/// Wraps A verbatim. Rejects rows that are identically zero.
Functional custom(const Matrix& a, std::string name = {});

struct DiagDominanceReport {
  bool dominant = false;
  /// min_i (|d_ii| - sum_{j != i} |d_ij|) over the rows of A A^T.
  double slack = 0.0;
  /// Zero-based row attaining the slack.
  Index worst_row = 0;
};

/// Row diagonal dominance of A A^T. Throws for the max-norm.
DiagDominanceReport diag_dominance_report(const Functional& f);

}  // namespace specflow
