#pragma once

#include "specflow/flow.hpp"

#include <string>
#include <vector>

namespace specflow {

struct Atom {
  double lambda = 0.0;
  Vector mass;
};

/// Atomic spectral measure: atoms ordered by strictly decreasing lambda.
struct SpectralMeasure {
  std::vector<Atom> atoms;
  Vector f_bar;
  /// The decomposed datum.
  Vector f;
  std::string source;
};

/// Pushes p(t) dt through lambda(t) = ||p(t)||. Segments whose lambdas agree to
/// merge_rel (relative) share one atom. Throws PreconditionError if the flow is not extinct.
SpectralMeasure spectral_measure(const Trajectory& traj, double merge_rel = 1e-12);

/// f_bar + sum of the atom masses.
Vector reconstruct(const SpectralMeasure& mu);

/// ||reconstruct(mu) - f||.
double reconstruction_error(const SpectralMeasure& mu);

/// Sum of the masses with lambda in [lo, hi] (closed), plus f_bar when include_dc is set.
Vector band_filter(const SpectralMeasure& mu, double lo, double hi, bool include_dc = true);

struct OrthogonalityEntry {
  int r = 0;
  int s = 0;
  int t = 0;
  double value = 0.0;
};

struct OrthogonalityReport {
  /// max |<p_t, p_s - p_r>| over segment triples r <= s <= t.
  double max_violation = 0.0;
  /// max_k ||p_k||^2.
  double scale = 0.0;
  /// The bound is only claimed when every segment is a certified eigenvector.
  bool asserted = false;
  bool ok = false;
  /// Every triple, kept when there are at most table_limit of them.
  std::vector<OrthogonalityEntry> table;
};

OrthogonalityReport orthogonality_report(const Trajectory& traj, double tol = 1e-8,
                                         std::size_t table_limit = 20000);

struct HierarchyReport {
  bool ok = false;
  /// max over k <= l of |<p_k, p_l> - J(p_l)| / (1 + J(p_l)).
  double worst = 0.0;
  /// First failing pair (k, l), or (-1, -1).
  int fail_k = -1;
  int fail_l = -1;
};

/// Checks p_k in dJ(p_l) for every k <= l: <p_k, p_l> = J(p_l) and p_k in K.
HierarchyReport hierarchy_check(const Trajectory& traj, double tol = 1e-8);

struct DecompositionReport {
  HierarchyReport hierarchy;
  double reconstruction_error = 0.0;
  bool ok = false;
};

/// The hierarchy condition plus reconstruction; certifies that the flow is a spectral decomposition.
DecompositionReport verify_decomposition_condition(const Trajectory& traj);

struct Eigenpair {
  Vector u;
  double lambda = 0.0;
  double gamma = 0.0;
};

struct Sub0Datum {
  Vector f;
  /// Breakpoints gamma_j / lambda_j in increasing order.
  std::vector<double> schedule;
};

/// f = sum gamma_i u_i after checking that each p_i = lambda_i u_i is an eigenvector,
/// the p_i are pairwise orthogonal and every tail sum (ordered by gamma_i / lambda_i) lies in K.
/// Throws PreconditionError naming the failing index, pair or tail.
Sub0Datum synthesize_sub0_datum(const Functional& F, const std::vector<Eigenpair>& pairs,
                                double tol = 1e-9);

}  // namespace specflow
