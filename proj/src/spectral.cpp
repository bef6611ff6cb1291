#include "specflow/spectral.hpp"

#include "specflow/minsub.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace specflow {

SpectralMeasure spectral_measure(const Trajectory& traj, double merge_rel) {
  if (!traj.extinct) throw PreconditionError("spectral_measure: trajectory is not extinct");
  SpectralMeasure mu;
  mu.f = traj.f;
  mu.f_bar = traj.f_bar;
  mu.source = traj.functional.name();
  for (Index k = 0; k < traj.segments(); ++k) {
    const std::size_t s = std::size_t(k);
    const Vector& p = traj.slopes[s];
    const double lambda = p.norm();
    const Vector mass = (traj.times[s + 1] - traj.times[s]) * p;
    if (!mu.atoms.empty() &&
        std::abs(mu.atoms.back().lambda - lambda) <= merge_rel * std::max(lambda, mu.atoms.back().lambda)) {
      mu.atoms.back().mass += mass;
      continue;
    }
    mu.atoms.push_back({lambda, mass});
  }
  return mu;
}

Vector reconstruct(const SpectralMeasure& mu) {
  Vector out = mu.f_bar;
  for (const Atom& a : mu.atoms) out += a.mass;
  return out;
}

double reconstruction_error(const SpectralMeasure& mu) { return (reconstruct(mu) - mu.f).norm(); }

Vector band_filter(const SpectralMeasure& mu, double lo, double hi, bool include_dc) {
  Vector out = include_dc ? mu.f_bar : Vector(Vector::Zero(mu.f_bar.size()));
  for (const Atom& a : mu.atoms)
    if (a.lambda >= lo && a.lambda <= hi) out += a.mass;
  return out;
}

namespace {

Matrix slope_gram(const Trajectory& traj) {
  const Index k = traj.segments();
  Matrix g(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = i; j < k; ++j)
      g(i, j) = g(j, i) = traj.slopes[std::size_t(i)].dot(traj.slopes[std::size_t(j)]);
  return g;
}

}  // namespace

OrthogonalityReport orthogonality_report(const Trajectory& traj, double tol,
                                         std::size_t table_limit) {
  OrthogonalityReport rep;
  const Index k = traj.segments();
  const Matrix g = slope_gram(traj);
  for (Index i = 0; i < k; ++i) rep.scale = std::max(rep.scale, g(i, i));
  const std::size_t triples = std::size_t(k) * std::size_t(k + 1) * std::size_t(k + 2) / 6;
  const bool keep = triples <= table_limit;
  for (Index r = 0; r < k; ++r)
    for (Index s = r; s < k; ++s)
      for (Index t = s; t < k; ++t) {
        const double v = g(t, s) - g(t, r);
        rep.max_violation = std::max(rep.max_violation, std::abs(v));
        if (keep) rep.table.push_back({int(r), int(s), int(t), v});
      }
  rep.asserted = traj.all_eigenvectors();
  rep.ok = rep.max_violation <= tol * std::max(1.0, rep.scale);
  return rep;
}

HierarchyReport hierarchy_check(const Trajectory& traj, double tol) {
  HierarchyReport rep;
  rep.ok = true;
  const Functional& F = traj.functional;
  const Index k = traj.segments();
  std::vector<bool> in_k(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i)
    in_k[std::size_t(i)] = membership_in_K(F, traj.slopes[std::size_t(i)]).member();
  for (Index l = 0; l < k; ++l) {
    const Vector& pl = traj.slopes[std::size_t(l)];
    const double jl = F.value(pl);
    for (Index i = 0; i <= l; ++i) {
      const double v = std::abs(traj.slopes[std::size_t(i)].dot(pl) - jl) / (1.0 + jl);
      rep.worst = std::max(rep.worst, v);
      if ((v > tol || !in_k[std::size_t(i)]) && rep.ok) {
        rep.ok = false;
        rep.fail_k = int(i);
        rep.fail_l = int(l);
      }
    }
  }
  return rep;
}

DecompositionReport verify_decomposition_condition(const Trajectory& traj) {
  DecompositionReport rep;
  rep.hierarchy = hierarchy_check(traj);
  if (!traj.extinct) return rep;
  rep.reconstruction_error = reconstruction_error(spectral_measure(traj));
  rep.ok = rep.hierarchy.ok && rep.reconstruction_error <= 1e-9 * (1.0 + traj.f.norm());
  return rep;
}

Sub0Datum synthesize_sub0_datum(const Functional& F, const std::vector<Eigenpair>& pairs,
                                double tol) {
  if (pairs.empty()) throw PreconditionError("synthesize_sub0_datum: no eigenpairs given");
  const std::size_t n = pairs.size();
  std::vector<Vector> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigenpair& e = pairs[i];
    if (e.u.size() != F.dim()) throw DimensionError("synthesize_sub0_datum: dimension mismatch");
    if (!(e.lambda > 0.0) || !(e.gamma > 0.0))
      throw PreconditionError("synthesize_sub0_datum: lambda and gamma of pair " +
                              std::to_string(i) + " must be positive");
    p[i] = e.lambda * e.u;
    const MembershipResult m = membership_in_K(F, p[i]);
    if (!m.member())
      throw PreconditionError("synthesize_sub0_datum: p_" + std::to_string(i) + " is not in K");
    const EigenCheck ec = is_eigenvector(F, Subgradient{p[i], m.q, m.residual}, tol);
    if (!ec.eigenvector)
      throw PreconditionError("synthesize_sub0_datum: p_" + std::to_string(i) +
                              " is not an eigenvector (defect " + std::to_string(ec.defect) + ")");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ip = p[i].dot(p[j]);
      if (std::abs(ip) > tol * (1.0 + p[i].norm() * p[j].norm()))
        throw PreconditionError("synthesize_sub0_datum: p_" + std::to_string(i) + " and p_" +
                                std::to_string(j) + " are not orthogonal (inner product " +
                                std::to_string(ip) + ")");
    }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pairs[a].gamma / pairs[a].lambda < pairs[b].gamma / pairs[b].lambda;
  });
  Vector tail = Vector::Zero(F.dim());
  for (std::size_t j = n; j-- > 0;) {
    tail += p[order[j]];
    if (!membership_in_K(F, tail).member())
      throw PreconditionError("synthesize_sub0_datum: tail sum starting at p_" +
                              std::to_string(order[j]) + " is not in K");
  }

  Sub0Datum out;
  out.f = Vector::Zero(F.dim());
  for (const Eigenpair& e : pairs) out.f += e.gamma * e.u;
  for (std::size_t j : order) out.schedule.push_back(pairs[j].gamma / pairs[j].lambda);
  return out;
}

}  // namespace specflow
