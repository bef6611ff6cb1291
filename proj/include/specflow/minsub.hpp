#pragma once

#include "specflow/box_qp.hpp"
#include "specflow/core.hpp"

#include <vector>

namespace specflow {

/// Partition of the dual coordinates into fixed +1, fixed -1 and free.
struct SignPattern {
  /// +1, -1, or 0 for free, one entry per dual coordinate.
  std::vector<signed char> sign;

  Index size() const { return Index(sign.size()); }
  Index free_count() const;
  bool operator==(const SignPattern&) const = default;
};

/// Relative zero threshold: |z_i| <= eps_rel (1 + ||z||_inf) marks coordinate i free.
double zero_threshold(const Vector& z, double eps_rel);

/// Pattern of z = Au (or of u itself for the max-norm).
SignPattern sign_pattern(const Functional& f, const Vector& u, double eps_rel = 1e-9);

struct MinsubOptions {
  double eps_z = 1e-9;
  BoxLsqOptions qp;
};

/// Minimal-norm element of the face of K selected by the pattern: p = A^T q with
/// q fixed on the signed coordinates and q in [-1, 1] on the free ones.
/// For the max-norm the pattern selects the maximal set directly.
Subgradient min_norm_for_pattern(const Functional& f, const SignPattern& pattern,
                                 const MinsubOptions& opts = {},
                                 const Vector* warm_q = nullptr);

/// The minimal-norm subgradient A^0 u. Throws ConvergenceError when the QP stalls.
Subgradient min_norm_subgradient(const Functional& f, const Vector& u,
                                 const MinsubOptions& opts = {});

struct EigenCheck {
  bool eigenvector = false;
  /// J(p) - ||p||^2.
  double defect = 0.0;
};

/// Whether p in K satisfies J(p) = ||p||^2, i.e. p is an eigenvector with eigenvalue 1 up to scale.
/// The certificate stored in sg is validated first.
EigenCheck is_eigenvector(const Functional& f, const Subgradient& sg, double tol = 1e-8);

struct MinsubCheck {
  bool holds = false;
  double worst = 0.0;
  /// inf and sup of <p, q> over q in dJ(u).
  double inf = 0.0;
  double sup = 0.0;
};

/// Tests <p, p - q> = 0 for every q in dJ(u), using the closed-form extremes of the
/// linear function q -> <p, q> over the face.
MinsubCheck check_minsub(const Functional& f, const Vector& u, const Subgradient& sg,
                         double tol = 1e-8, double eps_z = 1e-9);

struct Eigenvalue {
  double lambda = 0.0;
  bool certified = false;
};

/// lambda = J(u) / ||u||^2, certified when lambda u lies in dJ(u).
Eigenvalue eigenvalue_of(const Functional& f, const Vector& u);

}  // namespace specflow
