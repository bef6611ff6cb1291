#include "specflow/functionals.hpp"

#include <cmath>
#include <limits>

namespace specflow {

Functional tv1d(Index n) {
  if (n < 2) throw PreconditionError("tv1d: n must be at least 2");
  Matrix a = Matrix::Zero(n - 1, n);
  for (Index i = 0; i + 1 < n; ++i) {
    a(i, i) = -1.0;
    a(i, i + 1) = 1.0;
  }
  return Functional::polyhedral(std::move(a), Structure::tv1d);
}

Functional tv1d_dirichlet(Index n) {
  if (n < 1) throw PreconditionError("tv1d_dirichlet: n must be at least 1");
  Matrix a = Matrix::Zero(n + 1, n);
  for (Index i = 0; i <= n; ++i) {
    if (i < n) a(i, i) = 1.0;
    if (i > 0) a(i, i - 1) = -1.0;
  }
  return Functional::polyhedral(std::move(a), Structure::custom, "tv1d_dirichlet");
}

Functional l1(Index n) {
  if (n < 1) throw PreconditionError("l1: n must be at least 1");
  return Functional::polyhedral(Matrix::Identity(n, n), Structure::l1);
}

Functional linf(Index n) { return Functional::max_norm(n); }

Functional grid_divergence(const GridSpec& g) {
  if (g.nx < 1 || g.ny < 1) throw PreconditionError("grid_divergence: nx and ny must be positive");
  const Index cells = g.cells();
  Matrix a = Matrix::Zero(cells, 2 * cells);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Index c = i + Index(g.nx) * j;
      a(c, c) += 1.0;
      if (i > 0) a(c, c - 1) -= 1.0;
      a(c, cells + c) += 1.0;
      if (j > 0) a(c, cells + c - g.nx) -= 1.0;
    }
  }
  return Functional::polyhedral(std::move(a), Structure::grid_div, "grid_div", g);
}

Functional custom(const Matrix& a, std::string name) {
  for (Index i = 0; i < a.rows(); ++i)
    if (a.row(i).cwiseAbs().maxCoeff() == 0.0)
      throw PreconditionError("custom: row " + std::to_string(i) + " of A is zero");
  return Functional::polyhedral(a, Structure::custom, std::move(name));
}

DiagDominanceReport diag_dominance_report(const Functional& f) {
  const Matrix& a = f.op();
  const Matrix d = a * a.transpose();
  DiagDominanceReport rep;
  if (d.rows() == 0) {
    rep.dominant = true;
    return rep;
  }
  rep.slack = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < d.rows(); ++i) {
    const double off = d.row(i).cwiseAbs().sum() - std::abs(d(i, i));
    const double s = std::abs(d(i, i)) - off;
    if (s < rep.slack) {
      rep.slack = s;
      rep.worst_row = i;
    }
  }
  rep.dominant = rep.slack >= -1e-12 * (1.0 + d.cwiseAbs().maxCoeff());
  return rep;
}

}  // namespace specflow
