#include "specflow/box_qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace specflow {
namespace {

enum class Bound : signed char { lower = -1, free = 0, upper = 1 };

double power_iteration_lipschitz(const Matrix& m) {
  if (m.cols() == 0 || m.rows() == 0) return 0.0;
  Vector v = Vector::Ones(m.cols()) / std::sqrt(double(m.cols()));
  double est = 0.0;
  for (int it = 0; it < 60; ++it) {
    Vector w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = nw;
    v = w / nw;
    if (std::abs(next - est) <= 1e-6 * next) {
      est = next;
      break;
    }
    est = next;
  }
  // Power iteration approaches from below; pad so 1/L stays a valid step.
  return 1.05 * est + 1e-300;
}

Vector clamp(const Vector& x, const Vector& lo, const Vector& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

Vector fista(const Matrix& m, const Vector& c, const Vector& lo, const Vector& hi,
             Vector x, const BoxLsqOptions& opts, double stop, int& iters) {
  const double lip = power_iteration_lipschitz(m);
  if (lip == 0.0) return x;
  const double step = 1.0 / lip;
  Vector y = x;
  double t = 1.0;
  double prev_obj = 0.5 * (m * x - c).squaredNorm();
  for (int k = 0; k < opts.max_first_order_iters; ++k) {
    ++iters;
    const Vector g = m.transpose() * (m * y - c);
    Vector xn = clamp(y - step * g, lo, hi);
    const double obj = 0.5 * (m * xn - c).squaredNorm();
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (obj > prev_obj) {
      // adaptive restart
      y = x;
      t = 1.0;
      continue;
    }
    y = xn + ((t - 1.0) / tn) * (xn - x);
    x = std::move(xn);
    t = tn;
    prev_obj = obj;
    if (k % 16 == 0 && projected_gradient_norm(m, c, lo, hi, x) <= stop) break;
  }
  return x;
}

// Primal active-set method. Returns false if the iteration cap was hit.
bool active_set(const Matrix& m, const Vector& c, const Vector& lo, const Vector& hi,
                Vector& x, int cap, int& iters) {
  const Index k = x.size();
  std::vector<Bound> state(std::size_t(k), Bound::free);

  const double gscale = 1.0 + (m.transpose() * c).cwiseAbs().maxCoeff() +
                        (m.cwiseAbs().colwise().sum()).maxCoeff() * (1.0 + x.cwiseAbs().maxCoeff());
  const double gtol = 1e-13 * gscale;

  {
    const Vector g = m.transpose() * (m * x - c);
    for (Index i = 0; i < k; ++i) {
      const double width = hi(i) - lo(i);
      const double snap = 1e-9 * width;
      if (x(i) <= lo(i) + snap && g(i) >= -gtol) {
        state[std::size_t(i)] = Bound::lower;
        x(i) = lo(i);
      } else if (x(i) >= hi(i) - snap && g(i) <= gtol) {
        state[std::size_t(i)] = Bound::upper;
        x(i) = hi(i);
      }
    }
  }

  int degenerate_steps = 0;
  std::vector<Index> free_idx;
  free_idx.reserve(std::size_t(k));
  for (int it = 0; it < cap; ++it) {
    ++iters;
    free_idx.clear();
    for (Index i = 0; i < k; ++i)
      if (state[std::size_t(i)] == Bound::free) free_idx.push_back(i);

    if (!free_idx.empty()) {
      const Vector r = c - m * x;
      Matrix mf(m.rows(), Index(free_idx.size()));
      for (std::size_t j = 0; j < free_idx.size(); ++j) mf.col(Index(j)) = m.col(free_idx[j]);
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
      cod.setThreshold(1e-12);
      cod.compute(mf);
      const Vector d = cod.solve(r);

      double alpha = 1.0;
      for (std::size_t j = 0; j < free_idx.size(); ++j) {
        const Index i = free_idx[j];
        const double dj = d(Index(j));
        if (dj > 0.0 && x(i) + dj > hi(i)) alpha = std::min(alpha, (hi(i) - x(i)) / dj);
        if (dj < 0.0 && x(i) + dj < lo(i)) alpha = std::min(alpha, (lo(i) - x(i)) / dj);
      }
      alpha = std::max(alpha, 0.0);
      for (std::size_t j = 0; j < free_idx.size(); ++j) x(free_idx[j]) += alpha * d(Index(j));

      if (alpha < 1.0) {
        if (alpha == 0.0) ++degenerate_steps;
        for (std::size_t j = 0; j < free_idx.size(); ++j) {
          const Index i = free_idx[j];
          const double width = hi(i) - lo(i);
          const double dj = d(Index(j));
          if (dj > 0.0 && x(i) >= hi(i) - 1e-12 * width) {
            x(i) = hi(i);
            state[std::size_t(i)] = Bound::upper;
          } else if (dj < 0.0 && x(i) <= lo(i) + 1e-12 * width) {
            x(i) = lo(i);
            state[std::size_t(i)] = Bound::lower;
          }
        }
        continue;
      }
    }

    // Optimal on the current face; look for a bound whose multiplier has the wrong sign.
    const Vector g = m.transpose() * (m * x - c);
    Index release = -1;
    double worst = gtol;
    const bool bland = degenerate_steps > 2 * k + 10;
    for (Index i = 0; i < k; ++i) {
      double viol = 0.0;
      if (state[std::size_t(i)] == Bound::lower) viol = -g(i);
      if (state[std::size_t(i)] == Bound::upper) viol = g(i);
      if (viol > worst) {
        release = i;
        worst = viol;
        if (bland) break;
      }
    }
    if (release < 0) return true;
    state[std::size_t(release)] = Bound::free;
  }
  return false;
}

}  // namespace

double projected_gradient_norm(const Matrix& m, const Vector& c, const Vector& lo,
                               const Vector& hi, const Vector& x) {
  const Vector g = m.transpose() * (m * x - c);
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    double gi = g(i);
    if (x(i) <= lo(i)) gi = std::min(gi, 0.0);
    if (x(i) >= hi(i)) gi = std::max(gi, 0.0);
    acc += gi * gi;
  }
  return std::sqrt(acc);
}

BoxLsqResult solve_box_lsq(const Matrix& m, const Vector& c, const Vector& lo,
                           const Vector& hi, const BoxLsqOptions& opts,
                           const Vector* warm_start) {
  const Index k = m.cols();
  if (c.size() != m.rows() || lo.size() != k || hi.size() != k)
    throw DimensionError("solve_box_lsq: inconsistent problem dimensions");
  if ((lo.array() > hi.array()).any())
    throw PreconditionError("solve_box_lsq: empty box");
  if (warm_start && warm_start->size() != k)
    throw DimensionError("solve_box_lsq: warm start has wrong size");

  BoxLsqResult res;
  const double stop = opts.rel_tol * (1.0 + c.norm());
  if (k == 0) {
    res.x = Vector(0);
    res.residual = -c;
    res.converged = true;
    return res;
  }

  Vector x = warm_start ? clamp(*warm_start, lo, hi) : Vector(clamp(Vector::Zero(k), lo, hi));
  if (!warm_start) x = fista(m, c, lo, hi, std::move(x), opts, stop, res.iterations);

  const Vector first_order = x;
  const int cap = opts.max_active_set_iters > 0 ? opts.max_active_set_iters : int(20 * (k + 10));
  bool ok = active_set(m, c, lo, hi, x, cap, res.iterations);
  double pg = projected_gradient_norm(m, c, lo, hi, x);

  if (!ok || pg > stop) {
    // Retry from a cold first-order solution if the warm start misled the active set.
    Vector y = warm_start ? fista(m, c, lo, hi, first_order, opts, stop, res.iterations) : first_order;
    const double pg_y = projected_gradient_norm(m, c, lo, hi, y);
    if (warm_start) {
      Vector z = y;
      if (active_set(m, c, lo, hi, z, cap, res.iterations)) {
        const double pg_z = projected_gradient_norm(m, c, lo, hi, z);
        if (pg_z < pg) {
          x = z;
          pg = pg_z;
        }
      }
    }
    if (pg_y < pg) {
      x = y;
      pg = pg_y;
    }
  }

  res.x = std::move(x);
  res.residual = m * res.x - c;
  res.projected_gradient_norm = pg;
  res.converged = pg <= stop;
  return res;
}

}  // namespace specflow
