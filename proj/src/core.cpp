#include "specflow/core.hpp"

#include "specflow/box_qp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace specflow {

Signal::Signal(Vector values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() < 1) throw PreconditionError("Signal: dimension must be at least 1");
  if (!values_.allFinite()) throw PreconditionError("Signal: entries must be finite");
}

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::tv1d: return "tv1d";
    case Structure::l1: return "l1";
    case Structure::linf: return "linf";
    case Structure::grid_div: return "grid_div";
    case Structure::custom: return "custom";
  }
  return "custom";
}

Structure structure_from_string(std::string_view name) {
  if (name == "tv1d") return Structure::tv1d;
  if (name == "l1") return Structure::l1;
  if (name == "linf") return Structure::linf;
  if (name == "grid_div") return Structure::grid_div;
  if (name == "custom") return Structure::custom;
  throw PreconditionError("unknown functional type '" + std::string(name) + "'");
}

struct Functional::Data {
  Structure tag = Structure::custom;
  std::string name;
  std::optional<GridSpec> grid;
  Index n = 0;
  Index m = 0;
  Matrix a;
  Matrix kernel;
  Index rank = 0;
  double norm_sq = 1.0;
};

namespace {

void factor_operator(Functional::Data& d);

}  // namespace

Functional Functional::polyhedral(Matrix a, Structure tag, std::string name,
                                  std::optional<GridSpec> grid) {
  if (tag == Structure::linf)
    throw PreconditionError("Functional::polyhedral: use max_norm for the linf structure");
  if (a.cols() < 1) throw PreconditionError("Functional: operator needs at least one column");
  if (!a.allFinite()) throw PreconditionError("Functional: operator entries must be finite");
  auto d = std::make_shared<Data>();
  d->tag = tag;
  d->name = name.empty() ? std::string(to_string(tag)) : std::move(name);
  d->grid = grid;
  d->n = a.cols();
  d->m = a.rows();
  d->a = std::move(a);
  factor_operator(*d);
  return Functional(std::move(d));
}

Functional Functional::max_norm(Index n) {
  if (n < 1) throw PreconditionError("linf: n must be at least 1");
  auto d = std::make_shared<Data>();
  d->tag = Structure::linf;
  d->name = "linf";
  d->n = n;
  d->m = n;
  d->kernel = Matrix(n, 0);
  d->rank = n;
  d->norm_sq = 1.0;
  return Functional(std::move(d));
}

Structure Functional::structure() const noexcept { return d_->tag; }
const std::string& Functional::name() const noexcept { return d_->name; }
const std::optional<GridSpec>& Functional::grid() const noexcept { return d_->grid; }
Index Functional::dim() const noexcept { return d_->n; }
Index Functional::dual_dim() const noexcept { return d_->m; }
const Matrix& Functional::kernel_basis() const noexcept { return d_->kernel; }
Index Functional::rank() const noexcept { return d_->rank; }
double Functional::op_norm_sq() const noexcept { return d_->norm_sq; }

const Matrix& Functional::op() const {
  if (is_linf()) throw PreconditionError("linf functional has no operator");
  return d_->a;
}

Vector Functional::apply(const Vector& u) const {
  if (u.size() != dim()) throw DimensionError("apply: signal dimension does not match functional");
  if (is_linf()) return u;
  return d_->a * u;
}

Vector Functional::apply_adjoint(const Vector& q) const {
  if (q.size() != dual_dim())
    throw DimensionError("apply_adjoint: dual vector dimension does not match functional");
  if (is_linf()) return q;
  return d_->a.transpose() * q;
}

double Functional::value(const Vector& u) const {
  if (u.size() != dim()) throw DimensionError("J: signal dimension does not match functional");
  if (is_linf()) return u.cwiseAbs().maxCoeff();
  return (d_->a * u).lpNorm<1>();
}

namespace {

void factor_operator(Functional::Data& d) {
  const Index n = d.n;
  if (d.tag == Structure::l1) {
    d.kernel = Matrix(n, 0);
    d.rank = n;
    d.norm_sq = 1.0;
    return;
  }
  if (d.tag == Structure::tv1d) {
    d.kernel = Vector::Constant(n, 1.0 / std::sqrt(double(n)));
    d.rank = n - 1;
    // Largest eigenvalue of the path Laplacian.
    const double c = std::cos(M_PI / double(n));
    d.norm_sq = 2.0 + 2.0 * c;
    return;
  }
  if (d.m == 0) {
    d.kernel = Matrix::Identity(n, n);
    d.rank = 0;
    d.norm_sq = 0.0;
    return;
  }
  Eigen::BDCSVD<Matrix> svd(d.a, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double thresh = 1e-10 * std::max(1.0, smax) * double(std::max(d.m, n));
  Index r = 0;
  while (r < s.size() && s(r) > thresh) ++r;
  d.rank = r;
  d.norm_sq = smax * smax;
  d.kernel = svd.matrixV().rightCols(n - r);
}

}  // namespace

double evaluate_J(const Functional& f, const Vector& u) { return f.value(u); }

Vector nullspace_project(const Functional& f, const Vector& x) {
  if (x.size() != f.dim()) throw DimensionError("nullspace_project: dimension mismatch");
  const Matrix& k = f.kernel_basis();
  if (k.cols() == 0) return Vector::Zero(x.size());
  if (f.structure() == Structure::tv1d) return Vector::Constant(x.size(), x.mean());
  return k * (k.transpose() * x);
}

double default_cert_tol(const Vector& p) { return 1e-9 * (1.0 + p.norm()); }

Vector project_l1_ball(const Vector& x, double radius) {
  if (radius <= 0.0) return Vector::Zero(x.size());
  if (x.lpNorm<1>() <= radius) return x;
  std::vector<double> a(std::size_t(x.size()));
  for (Index i = 0; i < x.size(); ++i) a[std::size_t(i)] = std::abs(x(i));
  std::sort(a.begin(), a.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    cum += a[k];
    const double cand = (cum - radius) / double(k + 1);
    if (k + 1 == a.size() || a[k + 1] <= cand) {
      theta = cand;
      break;
    }
  }
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double v = std::max(std::abs(x(i)) - theta, 0.0);
    out(i) = x(i) < 0 ? -v : v;
  }
  return out;
}

MembershipResult membership_in_K(const Functional& f, const Vector& p, std::optional<double> tol) {
  if (p.size() != f.dim()) throw DimensionError("membership_in_K: dimension mismatch");
  const double t = tol.value_or(default_cert_tol(p));
  MembershipResult res;
  if (f.is_linf()) {
    // K is the unit l1 ball; the certificate is the nearest point of the ball.
    res.q = project_l1_ball(p, 1.0);
    res.residual = (res.q - p).norm();
    res.status = res.residual <= t ? MembershipStatus::member : MembershipStatus::not_member;
    return res;
  }
  const Index m = f.dual_dim();
  const BoxLsqResult qp = solve_box_lsq(f.op().transpose(), p, Vector::Constant(m, -1.0),
                                        Vector::Constant(m, 1.0));
  res.q = qp.x;
  res.residual = qp.residual.norm();
  if (res.residual <= t)
    res.status = MembershipStatus::member;
  else
    res.status = qp.converged ? MembershipStatus::not_member : MembershipStatus::solver_failed;
  return res;
}

Subgradient certify(const Functional& f, const Vector& p, std::optional<double> tol) {
  MembershipResult m = membership_in_K(f, p, tol);
  if (!m.member()) {
    if (m.status == MembershipStatus::solver_failed)
      throw ConvergenceError("certify: membership solver hit its iteration cap", m.residual);
    throw PreconditionError("certify: vector is not in the dual ball (residual " +
                            std::to_string(m.residual) + ")");
  }
  return Subgradient{p, std::move(m.q), m.residual};
}

}  // namespace specflow
