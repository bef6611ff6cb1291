#include "specflow/prox.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace specflow {
namespace {

struct Pt {
  double x;
  double y;
};

double slope(const Pt& a, const Pt& b) { return (b.y - a.y) / (b.x - a.x); }

// Adds p to the chain that hugs one side of the tube; `other` is the opposite chain.
// convex == true for the ceiling chain (slopes increasing), false for the floor chain.
void push_point(std::deque<Pt>& own, std::deque<Pt>& other, std::vector<Pt>& path,
                const Pt& p, bool convex) {
  auto bends_wrong = [convex](double prev, double next) {
    return convex ? next <= prev : next >= prev;
  };
  while (own.size() >= 2 && bends_wrong(slope(own[own.size() - 2], own.back()),
                                        slope(own[own.size() - 2], p)))
    own.pop_back();
  if (own.size() == 1) {
    // p may cross the opposite chain; the apex then advances along it.
    auto crosses = [convex](double to_p, double edge) {
      return convex ? to_p < edge : to_p > edge;
    };
    while (other.size() >= 2 && crosses(slope(other[0], p), slope(other[0], other[1]))) {
      other.pop_front();
      path.push_back(other.front());
    }
    own.clear();
    own.push_back(other.front());
  }
  own.push_back(p);
}

}  // namespace

Vector taut_string_prox(const Vector& f, double t) {
  if (t < 0.0) throw PreconditionError("taut_string_prox: t must be nonnegative");
  const Index n = f.size();
  if (n <= 1 || t == 0.0) return f;

  std::vector<double> cum(std::size_t(n) + 1, 0.0);
  for (Index i = 0; i < n; ++i) cum[std::size_t(i) + 1] = cum[std::size_t(i)] + f(i);

  std::vector<Pt> path{{0.0, 0.0}};
  std::deque<Pt> upper{{0.0, 0.0}};
  std::deque<Pt> lower{{0.0, 0.0}};
  for (Index i = 1; i < n; ++i) {
    const double c = cum[std::size_t(i)];
    push_point(upper, lower, path, {double(i), c + t}, true);
    push_point(lower, upper, path, {double(i), c - t}, false);
  }
  const Pt end{double(n), cum[std::size_t(n)]};
  push_point(upper, lower, path, end, true);
  push_point(lower, upper, path, end, false);
  const std::deque<Pt>& tail = upper.size() > lower.size() ? upper : lower;
  for (std::size_t k = 1; k < tail.size(); ++k) path.push_back(tail[k]);

  Vector x(n);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Index a = Index(std::lround(path[k - 1].x));
    const Index b = Index(std::lround(path[k].x));
    if (b <= a) continue;
    const double s = (path[k].y - path[k - 1].y) / double(b - a);
    for (Index j = a; j < b; ++j) x(j) = s;
  }
  return x;
}

VPSolution vp_solve(const Functional& F, const Vector& f, double t, const VpOptions& opts,
                    const Vector* warm_dual) {
  if (f.size() != F.dim()) throw DimensionError("vp_solve: dimension mismatch");
  if (!(t > 0.0)) throw PreconditionError("vp_solve: t must be positive");
  VPSolution sol;
  sol.t = t;

  if (F.is_linf()) {
    const Vector proj = project_l1_ball(f, t);
    sol.v = f - proj;
    sol.q = proj / t;
    sol.method = "l1-ball projection";
  } else if (F.structure() == Structure::l1 && !opts.force_generic) {
    sol.v = f.unaryExpr([t](double x) { return x > t ? x - t : (x < -t ? x + t : 0.0); });
    sol.q = (f - sol.v) / t;
    sol.method = "soft threshold";
  } else if (F.structure() == Structure::tv1d && !opts.force_generic) {
    sol.v = taut_string_prox(f, t);
    // Recover the dual from A^T y = f - v by cumulative sums.
    const Vector r = f - sol.v;
    sol.q = Vector(F.dual_dim());
    double acc = 0.0;
    for (Index i = 0; i < F.dual_dim(); ++i) {
      acc += r(i);
      sol.q(i) = std::clamp(-acc / t, -1.0, 1.0);
    }
    sol.method = "taut string";
  } else {
    const Index m = F.dual_dim();
    const BoxLsqResult qp = solve_box_lsq(F.op().transpose(), f, Vector::Constant(m, -t),
                                          Vector::Constant(m, t), opts.qp, warm_dual);
    if (!qp.converged)
      throw ConvergenceError("vp_solve: dual solver hit its iteration cap",
                             qp.projected_gradient_norm);
    sol.v = -qp.residual;
    sol.q = qp.x / t;
    sol.iterations = qp.iterations;
    sol.method = "dual box least squares";
  }

  sol.residual = (sol.v - f + t * F.apply_adjoint(sol.q)).norm();
  // Fenchel gap t J(v) - <t q, A v> (for the max-norm <q, v> plays the role of <q, Av>).
  sol.gap = t * (F.value(sol.v) - sol.q.dot(F.apply(sol.v)));
  return sol;
}

}  // namespace specflow
