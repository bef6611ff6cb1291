#pragma once

#include "specflow/flow.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace specflow {

/// T* = t_K of an extinct trajectory. Throws PreconditionError otherwise.
double extinction_time(const Trajectory& traj);

struct DualNormResult {
  double value = 0.0;
  /// Certificate with A^T q = f - f_bar and ||q||_inf = value up to the bisection width.
  Vector q;
  double residual = 0.0;
  /// Final bisection bracket.
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
};

/// ||f||_* = min ||q||_inf subject to A^T q = f - f_bar, by bisection on the box half-width
/// with a box least-squares feasibility test (residual <= tol). For the max-norm it is ||f||_1.
DualNormResult dual_norm(const Functional& F, const Vector& f, std::optional<double> tol = std::nullopt);

struct GroundStateOptions {
  int starts = 32;
  std::uint64_t seed = 0;
  /// Exact enumeration is used while the number of candidate vertices stays below this.
  double max_enumeration = 20000;
  int descent_iters = 3000;
};

struct GroundState {
  Vector u0;
  double lambda0 = 0.0;
  /// True when lambda0 comes from exact enumeration or a closed form.
  bool certified = false;
  std::string method;
};

/// Minimizer of J on the unit sphere of N(J)^perp.
///
/// Exact route: the maximum of ||u|| over the polytope {u in N(J)^perp : J(u) <= 1} sits at a
/// vertex, and every vertex has Au vanishing on rank(A) - 1 rows. Each such row subset with a
/// one-dimensional solution space gives a candidate. Above the enumeration cap a multi-start
/// projected subgradient descent on the sphere returns the best value found.
GroundState ground_state(const Functional& F, const GroundStateOptions& opts = {});

struct PoincareConstant {
  double c = 0.0;
  bool certified = false;
};

/// C = 1 / lambda0 with ||u - u_bar|| <= C J(u).
PoincareConstant poincare_constant(const Functional& F, const GroundStateOptions& opts = {});

struct ExtinctionProfile {
  Vector p_star;
  double eigen_defect = 0.0;
  /// ||p(t) - (u(t) - f_bar) / (T* - t)|| at t = T* (1 - 2^{-j}).
  std::vector<double> sample_times;
  std::vector<double> distances;
};

/// The last slope of the flow, which is the exact extinction profile of a piecewise-linear flow.
ExtinctionProfile extinction_profile(const Trajectory& traj);

struct ExtinctionReport {
  double t_star = 0.0;
  double dual_norm = 0.0;
  double poincare_c = 0.0;
  bool poincare_certified = false;
  /// C ||f - f_bar||.
  double upper_bound = 0.0;
  /// T* - ||f||_* and C ||f - f_bar|| - T*.
  double lower_slack = 0.0;
  double upper_slack = 0.0;
  Vector profile;
  double profile_eigen_defect = 0.0;
  /// <f, p*> / J(p*) and |T* - <f, p*> / J(p*)|.
  double profile_ratio = 0.0;
  double identity_gap = 0.0;
  /// J(p* / ||p*||) against ||f - f_bar|| / ||f||_*.
  double normalized_profile_j = 0.0;
  double profile_bound = 0.0;
  /// ||u(t) - f_bar|| / J(u(t)) maximised over the breakpoints; a trajectory-specific constant.
  double trajectory_c = 0.0;
  /// Whether the flow satisfies the decomposition condition (the identities are asserted only then).
  bool certified = false;
  bool ok = false;
};

/// Extinction time, dual norm, Poincare bound, profile and the identities linking them.
ExtinctionReport extinction_identities(const Functional& F, const Vector& f, const Trajectory& traj,
                                       const GroundStateOptions& opts = {});

struct BonforteFigalliReport {
  double h = 1.0;
  Index support_first = 0;
  Index support_last = -1;
  /// Measured extinction time in physical units (h times the grid time).
  double t_measured = 0.0;
  /// 1/2 sum f h.
  double t_predicted = 0.0;
  double t_rel_error = 0.0;
  /// 2 / (b - a) with b - a the discrete support length.
  double plateau_predicted = 0.0;
  /// max |p*_i / h - 2/(b-a)| / (2/(b-a)) over the interior of the support.
  double profile_rel_error = 0.0;
  Vector profile;
};

/// Runs total-variation flow with zero values outside the grid on nonnegative, compactly
/// supported f with spacing h and compares with T = 1/2 int f and p* = 2/(b - a) on [a, b].
BonforteFigalliReport bonforte_figalli_check(const Vector& f, double h = 1.0);

}  // namespace specflow
