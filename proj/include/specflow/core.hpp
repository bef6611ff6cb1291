#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace specflow {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (bad argument, missing certificate, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped at its iteration cap before reaching tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  /// Optimality measure reached when the solver gave up.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A finite real vector with an optional label. Entries are validated on construction.
class Signal {
 public:
  explicit Signal(Vector values, std::string label = {});

  const Vector& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  const std::string& label() const noexcept { return label_; }

 private:
  Vector values_;
  std::string label_;
};

enum class Structure { tv1d, l1, linf, grid_div, custom };

std::string_view to_string(Structure s);
Structure structure_from_string(std::string_view name);

/// Cell counts of a staggered 2D grid.
struct GridSpec {
  int nx = 1;
  int ny = 1;
  Index cells() const { return Index(nx) * ny; }
};

/// An absolutely one-homogeneous functional J(u) = ||Au||_1, or the max-norm.
///
/// The max-norm (Structure::linf) has no small operator A; its dual ball is the
/// l1 unit ball and it is handled by dedicated closed forms wherever A would be used.
/// Instances are immutable and cheap to copy.
class Functional {
 public:
  static Functional polyhedral(Matrix a, Structure tag, std::string name = {},
                               std::optional<GridSpec> grid = std::nullopt);
  static Functional max_norm(Index n);

  Structure structure() const noexcept;
  bool is_linf() const noexcept { return structure() == Structure::linf; }
  const std::string& name() const noexcept;
  const std::optional<GridSpec>& grid() const noexcept;

  /// Dimension n of the signal space.
  Index dim() const noexcept;
  /// Number m of dual coordinates (rows of A; n for the max-norm).
  Index dual_dim() const noexcept;

  /// Operator A. Throws PreconditionError for the max-norm.
  const Matrix& op() const;
  Vector apply(const Vector& u) const;
  Vector apply_adjoint(const Vector& q) const;

  /// Orthonormal basis (n x k) of the null space N(J).
  const Matrix& kernel_basis() const noexcept;
  /// Rank of A, i.e. dim N(J)^perp.
  Index rank() const noexcept;
  /// Squared spectral norm of A (1 for the max-norm).
  double op_norm_sq() const noexcept;

  double value(const Vector& u) const;

  /// Implementation storage, opaque outside the library.
  struct Data;

 private:
  explicit Functional(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// p in the dual ball K together with the certificate q (p = A^T q, |q_i| <= 1).
struct Subgradient {
  Vector p;
  Vector q;
  double residual = 0.0;
};

double evaluate_J(const Functional& f, const Vector& u);

/// Orthogonal projection onto N(J).
Vector nullspace_project(const Functional& f, const Vector& x);

enum class MembershipStatus { member, not_member, solver_failed };

struct MembershipResult {
  MembershipStatus status = MembershipStatus::not_member;
  Vector q;
  double residual = 0.0;
  bool member() const noexcept { return status == MembershipStatus::member; }
};

/// Default certificate tolerance 1e-9 (1 + ||p||).
double default_cert_tol(const Vector& p);

/// Tests p in K = {A^T q : ||q||_inf <= 1} by solving the box least-squares problem.
MembershipResult membership_in_K(const Functional& f, const Vector& p,
                                 std::optional<double> tol = std::nullopt);

/// Euclidean projection of x onto the l1 ball of the given radius.
Vector project_l1_ball(const Vector& x, double radius);

/// Builds a certified Subgradient for p, throwing PreconditionError if p is not in K.
Subgradient certify(const Functional& f, const Vector& p,
                    std::optional<double> tol = std::nullopt);

}  // namespace specflow
