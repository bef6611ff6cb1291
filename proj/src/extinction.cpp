#include "specflow/extinction.hpp"

#include "specflow/box_qp.hpp"
#include "specflow/functionals.hpp"
#include "specflow/minsub.hpp"
#include "specflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace specflow {

double extinction_time(const Trajectory& traj) {
  if (!traj.extinct) throw PreconditionError("extinction_time: trajectory is not extinct");
  return traj.final_time();
}

DualNormResult dual_norm(const Functional& F, const Vector& f, std::optional<double> tol) {
  if (f.size() != F.dim()) throw DimensionError("dual_norm: dimension mismatch");
  const Vector g = f - nullspace_project(F, f);
  DualNormResult out;
  if (F.is_linf()) {
    out.value = out.lower = out.upper = g.lpNorm<1>();
    out.q = g;
    return out;
  }
  const Index m = F.dual_dim();
  if (g.norm() <= 1e-14 * (1.0 + f.norm())) {
    out.q = Vector::Zero(m);
    return out;
  }
  const Matrix at = F.op().transpose();
  const double feas_tol = tol.value_or(1e-11 * (1.0 + g.norm()));

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(at);
  Vector q_hi = cod.solve(g);
  const double ls_res = (at * q_hi - g).norm();
  if (ls_res > std::max(feas_tol, 1e-9 * (1.0 + g.norm())))
    throw PreconditionError("dual_norm: f - f_bar is not in the range of A^T (residual " +
                            std::to_string(ls_res) + ")");

  double lo = g.squaredNorm() / F.value(g);
  double hi = q_hi.cwiseAbs().maxCoeff();
  const double width = 1e-10 * (1.0 + f.norm());
  if (lo > hi) lo = hi;
  BoxLsqOptions qo;
  while (hi - lo > width && out.iterations < 200) {
    ++out.iterations;
    const double mid = 0.5 * (lo + hi);
    const Vector warm = q_hi.cwiseMax(-mid).cwiseMin(mid);
    const BoxLsqResult r = solve_box_lsq(at, g, Vector::Constant(m, -mid), Vector::Constant(m, mid),
                                         qo, &warm);
    if (r.residual.norm() <= feas_tol) {
      hi = mid;
      q_hi = r.x;
    } else {
      lo = mid;
    }
  }
  out.value = hi;
  out.lower = lo;
  out.upper = hi;
  out.q = q_hi;
  out.residual = (at * q_hi - g).norm();
  return out;
}

namespace {

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Advances a sorted k-subset of {0..n-1}; false after the last one.
bool next_combination(std::vector<Index>& idx, Index n) {
  const Index k = Index(idx.size());
  for (Index i = k - 1; i >= 0; --i) {
    if (idx[std::size_t(i)] < n - k + i) {
      ++idx[std::size_t(i)];
      for (Index j = i + 1; j < k; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

void fix_sign(Vector& u) {
  for (Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > 1e-12) {
      if (u(i) < 0) u = -u;
      return;
    }
  }
}

}  // namespace

GroundState ground_state(const Functional& F, const GroundStateOptions& opts) {
  GroundState gs;
  const Index n = F.dim();
  if (F.is_linf()) {
    gs.u0 = Vector::Constant(n, 1.0 / std::sqrt(double(n)));
    gs.lambda0 = 1.0 / std::sqrt(double(n));
    gs.certified = true;
    gs.method = "closed form";
    return gs;
  }
  if (F.structure() == Structure::l1) {
    gs.u0 = Vector::Unit(n, 0);
    gs.lambda0 = 1.0;
    gs.certified = true;
    gs.method = "closed form";
    return gs;
  }
  if (F.structure() == Structure::tv1d) {
    // Mean-free steps: a jump after k nodes gives lambda = sqrt(n / (k (n - k))).
    Index best_k = 1;
    for (Index k = 1; k < n; ++k)
      if (k * (n - k) > best_k * (n - best_k)) best_k = k;
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = i < best_k ? double(n - best_k) : -double(best_k);
    gs.u0 = u.normalized();
    gs.lambda0 = F.value(gs.u0);
    gs.certified = true;
    gs.method = "closed form";
    return gs;
  }
  const Index r = F.rank();
  if (r < 1) throw PreconditionError("ground_state: N(J)^perp is trivial");
  const Matrix& a = F.op();
  const Index m = a.rows();

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Matrix basis = svd.matrixV().leftCols(r);
  const Matrix ab = a * basis;

  Vector best_c;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& c) {
    const double lam = (ab * c).lpNorm<1>() / c.norm();
    if (lam < best) {
      best = lam;
      best_c = c.normalized();
    }
  };

  if (log_binomial(double(m), double(r - 1)) <= std::log(opts.max_enumeration)) {
    // Candidate vertices: Au vanishes on a set T of r - 1 rows.
    const bool pick_zero_rows = (r - 1) <= (m - r + 1);
    const Index k = pick_zero_rows ? r - 1 : m - r + 1;
    std::vector<Index> idx(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) idx[std::size_t(i)] = i;
    std::vector<char> in_t(static_cast<std::size_t>(m));
    do {
      std::fill(in_t.begin(), in_t.end(), pick_zero_rows ? 0 : 1);
      for (Index i : idx) in_t[std::size_t(i)] = pick_zero_rows ? 1 : 0;
      if (r == 1) {
        consider(Vector::Ones(1));
        break;
      }
      Matrix sub(r - 1, r);
      Index row = 0;
      for (Index i = 0; i < m; ++i)
        if (in_t[std::size_t(i)]) sub.row(row++) = ab.row(i);
      Eigen::JacobiSVD<Matrix> js(sub, Eigen::ComputeFullV);
      const Vector& s = js.singularValues();
      const double thresh = 1e-10 * std::max(1.0, s(0));
      if (s(r - 2) <= thresh) continue;
      consider(js.matrixV().col(r - 1));
    } while (next_combination(idx, m));
    gs.certified = true;
    gs.method = "vertex enumeration";
  } else {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (int start = 0; start < opts.starts; ++start) {
      Vector c(r);
      for (Index i = 0; i < r; ++i) c(i) = normal(rng);
      c.normalize();
      for (int it = 0; it < opts.descent_iters; ++it) {
        const Vector z = ab * c;
        consider(c);
        Vector g = ab.transpose() * z.unaryExpr([](double x) { return double((x > 0) - (x < 0)); });
        g -= g.dot(c) * c;
        const double gn = g.norm();
        if (gn == 0.0) break;
        c -= (0.5 / std::sqrt(double(it + 1))) * g / gn;
        c.normalize();
      }
    }
    gs.certified = false;
    gs.method = "multi-start descent (best found)";
  }
  gs.u0 = basis * best_c;
  gs.u0.normalize();
  fix_sign(gs.u0);
  gs.lambda0 = F.value(gs.u0);
  return gs;
}

PoincareConstant poincare_constant(const Functional& F, const GroundStateOptions& opts) {
  const GroundState gs = ground_state(F, opts);
  return {1.0 / gs.lambda0, gs.certified};
}

ExtinctionProfile extinction_profile(const Trajectory& traj) {
  if (!traj.extinct) throw PreconditionError("extinction_profile: trajectory is not extinct");
  if (traj.segments() < 1) throw PreconditionError("extinction_profile: trajectory has no segments");
  ExtinctionProfile out;
  out.p_star = traj.slopes.back();
  out.eigen_defect = traj.functional.value(out.p_star) - out.p_star.squaredNorm();
  const double ts = traj.final_time();
  for (int j = 1; j <= 10; ++j) {
    const double t = ts * (1.0 - std::ldexp(1.0, -j));
    const auto [u, p] = evaluate_at(traj, t);
    const Vector w = (u - traj.f_bar) / (ts - t);
    out.sample_times.push_back(t);
    out.distances.push_back((p - w).norm());
  }
  return out;
}

ExtinctionReport extinction_identities(const Functional& F, const Vector& f, const Trajectory& traj,
                                       const GroundStateOptions& opts) {
  ExtinctionReport rep;
  rep.t_star = extinction_time(traj);
  const Vector g = f - nullspace_project(F, f);
  if (traj.segments() == 0) {
    rep.profile = Vector::Zero(f.size());
    rep.certified = true;
    rep.ok = true;
    return rep;
  }
  rep.dual_norm = dual_norm(F, f).value;
  const PoincareConstant pc = poincare_constant(F, opts);
  rep.poincare_c = pc.c;
  rep.poincare_certified = pc.certified;
  rep.upper_bound = pc.c * g.norm();
  rep.lower_slack = rep.t_star - rep.dual_norm;
  rep.upper_slack = rep.upper_bound - rep.t_star;

  rep.profile = traj.slopes.back();
  const double jp = F.value(rep.profile);
  rep.profile_eigen_defect = jp - rep.profile.squaredNorm();
  rep.profile_ratio = f.dot(rep.profile) / jp;
  rep.identity_gap = std::abs(rep.t_star - rep.profile_ratio);
  rep.normalized_profile_j = jp / rep.profile.norm();
  rep.profile_bound = f.norm() / rep.dual_norm;
  for (Index k = 0; k < traj.segments(); ++k) {
    const Vector& u = traj.states[std::size_t(k)];
    const double ju = F.value(u);
    if (ju > 0.0) rep.trajectory_c = std::max(rep.trajectory_c, (u - traj.f_bar).norm() / ju);
  }

  rep.certified = verify_decomposition_condition(traj).ok;
  const double bound_tol = 1e-7;
  bool ok = rep.lower_slack >= -bound_tol && rep.upper_slack >= -bound_tol;
  if (rep.certified) {
    ok = ok && rep.identity_gap <= 1e-8 * rep.t_star &&
         std::abs(rep.t_star - rep.dual_norm) <= bound_tol &&
         rep.normalized_profile_j <= rep.profile_bound + 1e-8;
  }
  rep.ok = ok;
  return rep;
}

BonforteFigalliReport bonforte_figalli_check(const Vector& f, double h) {
  if (!(h > 0.0)) throw PreconditionError("bonforte_figalli_check: h must be positive");
  if (f.size() < 1) throw PreconditionError("bonforte_figalli_check: empty signal");
  if ((f.array() < 0.0).any()) throw PreconditionError("bonforte_figalli_check: f must be nonnegative");
  BonforteFigalliReport rep;
  rep.h = h;
  const Index n = f.size();
  rep.profile = Vector::Zero(n);
  Index first = -1;
  Index last = -1;
  for (Index i = 0; i < n; ++i)
    if (f(i) > 0.0) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0) return rep;
  rep.support_first = first;
  rep.support_last = last;

  const Trajectory traj = run_event_driven(tv1d_dirichlet(n), f);
  if (!traj.extinct)
    throw Error("bonforte_figalli_check: flow did not reach extinction (" +
                std::string(to_string(traj.status)) + ")");
  // Grid time s and physical time t relate by t = h s, and the physical slope is p / h.
  rep.t_measured = h * traj.final_time();
  rep.t_predicted = 0.5 * f.sum() * h;
  rep.t_rel_error = std::abs(rep.t_measured - rep.t_predicted) / rep.t_predicted;
  rep.profile = traj.slopes.back() / h;
  rep.plateau_predicted = 2.0 / (double(last - first + 1) * h);
  const Index lo = last - first >= 2 ? first + 1 : first;
  const Index hi = last - first >= 2 ? last - 1 : last;
  for (Index i = lo; i <= hi; ++i)
    rep.profile_rel_error = std::max(
        rep.profile_rel_error, std::abs(rep.profile(i) - rep.plateau_predicted) / rep.plateau_predicted);
  return rep;
}

}  // namespace specflow
