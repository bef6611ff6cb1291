#include "specflow/minsub.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specflow {

Index SignPattern::free_count() const {
  return Index(std::count(sign.begin(), sign.end(), 0));
}

double zero_threshold(const Vector& z, double eps_rel) {
  const double zmax = z.size() ? z.cwiseAbs().maxCoeff() : 0.0;
  return eps_rel * (1.0 + zmax);
}

SignPattern sign_pattern(const Functional& f, const Vector& u, double eps_rel) {
  if (u.size() != f.dim()) throw DimensionError("sign_pattern: dimension mismatch");
  SignPattern pat;
  if (f.is_linf()) {
    // Nonzero entries mark the maximal set.
    pat.sign.assign(std::size_t(u.size()), 0);
    const double top = u.cwiseAbs().maxCoeff();
    if (top == 0.0) return pat;
    const double cut = top - eps_rel * (1.0 + top);
    for (Index i = 0; i < u.size(); ++i)
      if (std::abs(u(i)) >= cut) pat.sign[std::size_t(i)] = u(i) > 0 ? 1 : -1;
    return pat;
  }
  const Vector z = f.apply(u);
  const double eps = zero_threshold(z, eps_rel);
  pat.sign.assign(std::size_t(z.size()), 0);
  for (Index i = 0; i < z.size(); ++i) {
    if (z(i) > eps) pat.sign[std::size_t(i)] = 1;
    else if (z(i) < -eps) pat.sign[std::size_t(i)] = -1;
  }
  return pat;
}

Subgradient min_norm_for_pattern(const Functional& f, const SignPattern& pattern,
                                 const MinsubOptions& opts, const Vector* warm_q) {
  if (pattern.size() != f.dual_dim()) throw DimensionError("min_norm_for_pattern: pattern size mismatch");
  const Index m = f.dual_dim();
  const Index n = f.dim();

  if (f.is_linf()) {
    Subgradient sg;
    sg.p = Vector::Zero(n);
    const Index k = m - pattern.free_count();
    if (k > 0)
      for (Index i = 0; i < n; ++i) sg.p(i) = double(pattern.sign[std::size_t(i)]) / double(k);
    sg.q = sg.p;
    return sg;
  }

  const Matrix& a = f.op();
  std::vector<Index> free_idx;
  Vector fixed_part = Vector::Zero(n);
  Vector q(m);
  for (Index i = 0; i < m; ++i) {
    const signed char s = pattern.sign[std::size_t(i)];
    if (s == 0) {
      free_idx.push_back(i);
    } else {
      q(i) = s;
      fixed_part += double(s) * a.row(i).transpose();
    }
  }

  if (!free_idx.empty()) {
    const Index k = Index(free_idx.size());
    Matrix mf(n, k);
    Vector warm(k);
    for (Index j = 0; j < k; ++j) {
      mf.col(j) = a.row(free_idx[std::size_t(j)]).transpose();
      if (warm_q) warm(j) = (*warm_q)(free_idx[std::size_t(j)]);
    }
    const BoxLsqResult qp = solve_box_lsq(mf, -fixed_part, Vector::Constant(k, -1.0),
                                          Vector::Constant(k, 1.0), opts.qp,
                                          warm_q ? &warm : nullptr);
    if (!qp.converged)
      throw ConvergenceError("min_norm_subgradient: box QP hit its iteration cap",
                             qp.projected_gradient_norm);
    for (Index j = 0; j < k; ++j) q(free_idx[std::size_t(j)]) = qp.x(j);
  }

  Subgradient sg;
  sg.p = a.transpose() * q;
  sg.q = std::move(q);
  sg.residual = 0.0;
  return sg;
}

Subgradient min_norm_subgradient(const Functional& f, const Vector& u, const MinsubOptions& opts) {
  return min_norm_for_pattern(f, sign_pattern(f, u, opts.eps_z), opts);
}

namespace {

void validate_certificate(const Functional& f, const Subgradient& sg) {
  if (sg.p.size() != f.dim()) throw DimensionError("subgradient dimension mismatch");
  const double tol = default_cert_tol(sg.p);
  if (f.is_linf()) {
    if (sg.p.lpNorm<1>() > 1.0 + tol)
      throw PreconditionError("subgradient lies outside the unit l1 ball");
    return;
  }
  if (sg.q.size() != f.dual_dim())
    throw PreconditionError("subgradient has no certificate of the right size");
  if (sg.q.size() && sg.q.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
    throw PreconditionError("certificate violates the box |q_i| <= 1");
  if ((f.apply_adjoint(sg.q) - sg.p).norm() > tol)
    throw PreconditionError("certificate does not reproduce p");
}

}  // namespace

EigenCheck is_eigenvector(const Functional& f, const Subgradient& sg, double tol) {
  validate_certificate(f, sg);
  const double pp = sg.p.squaredNorm();
  EigenCheck out;
  out.defect = f.value(sg.p) - pp;
  out.eigenvector = std::abs(out.defect) <= tol * std::max(1.0, pp);
  return out;
}

MinsubCheck check_minsub(const Functional& f, const Vector& u, const Subgradient& sg,
                         double tol, double eps_z) {
  if (u.size() != f.dim() || sg.p.size() != f.dim())
    throw DimensionError("check_minsub: dimension mismatch");
  const SignPattern pat = sign_pattern(f, u, eps_z);
  MinsubCheck out;
  if (f.is_linf()) {
    if (pat.free_count() == pat.size()) {
      const double top = sg.p.size() ? sg.p.cwiseAbs().maxCoeff() : 0.0;
      out.inf = -top;
      out.sup = top;
    } else {
      out.inf = std::numeric_limits<double>::infinity();
      out.sup = -out.inf;
      for (Index i = 0; i < u.size(); ++i) {
        const signed char s = pat.sign[std::size_t(i)];
        if (s == 0) continue;
        out.inf = std::min(out.inf, s * sg.p(i));
        out.sup = std::max(out.sup, s * sg.p(i));
      }
    }
  } else {
    const Vector w = f.apply(sg.p);
    double base = 0.0;
    double spread = 0.0;
    for (Index i = 0; i < w.size(); ++i) {
      const signed char s = pat.sign[std::size_t(i)];
      if (s == 0) spread += std::abs(w(i));
      else base += s * w(i);
    }
    out.inf = base - spread;
    out.sup = base + spread;
  }
  const double pp = sg.p.squaredNorm();
  out.worst = std::max(std::abs(pp - out.inf), std::abs(out.sup - pp));
  out.holds = out.worst <= tol;
  return out;
}

Eigenvalue eigenvalue_of(const Functional& f, const Vector& u) {
  if (u.size() != f.dim()) throw DimensionError("eigenvalue_of: dimension mismatch");
  const double uu = u.squaredNorm();
  if (uu == 0.0) throw PreconditionError("eigenvalue_of: u must be nonzero");
  Eigenvalue ev;
  ev.lambda = f.value(u) / uu;
  // <lambda u, u> = J(u) holds by construction, so lambda u is in dJ(u) iff it is in K.
  ev.certified = membership_in_K(f, ev.lambda * u).member();
  return ev;
}

}  // namespace specflow
