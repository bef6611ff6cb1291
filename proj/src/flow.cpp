#include "specflow/flow.hpp"

#include "specflow/minsub.hpp"
#include "specflow/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace specflow {

std::string_view to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::extinct: return "extinct";
    case FlowStatus::event_cap: return "event_cap";
    case FlowStatus::stalled: return "stalled";
  }
  return "stalled";
}

bool Trajectory::all_eigenvectors(double tol) const {
  if (checks.size() != slopes.size()) return false;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    if (!checks[k].certified) return false;
    if (std::abs(checks[k].eigen_defect) > tol * std::max(1.0, slopes[k].squaredNorm()))
      return false;
  }
  return true;
}

namespace {

SegmentCheck verify_segment(const Functional& F, const Vector& u0, const Vector& p,
                            const Vector& q, double duration) {
  SegmentCheck c;
  const Vector mid = u0 - 0.5 * duration * p;
  c.cert_residual = (F.apply_adjoint(q) - p).norm();
  const bool in_box = F.is_linf() ? q.lpNorm<1>() <= 1.0 + 1e-12
                                  : (q.size() == 0 || q.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  const double jm = F.value(mid);
  c.face_gap = std::abs(p.dot(mid) - jm);
  c.certified = in_box && c.cert_residual <= default_cert_tol(p) &&
                c.face_gap <= 1e-9 * (1.0 + jm + p.norm() * mid.norm());
  const double pp = p.squaredNorm();
  c.eigen_defect = F.value(p) - pp;
  c.eigenvector = std::abs(c.eigen_defect) <= 1e-8 * std::max(1.0, pp);
  return c;
}

void push_segment(Trajectory& tr, const Functional& F, const FlowOptions& opts,
                  const Vector& p, const Vector& q, double duration, Vector next) {
  if (opts.verify_each_segment)
    tr.checks.push_back(verify_segment(F, tr.states.back(), p, q, duration));
  tr.slopes.push_back(p);
  tr.certificates.push_back(q);
  tr.times.push_back(tr.times.back() + duration);
  tr.states.push_back(std::move(next));
}

int event_cap(const Functional& F, const FlowOptions& opts) {
  if (opts.max_events > 0) return opts.max_events;
  return int(std::max<Index>(10 * F.dual_dim(), 20));
}

void run_max_norm(Trajectory& tr, const Functional& F, const FlowOptions& opts) {
  const int cap = event_cap(F, opts);
  Vector u = tr.f;
  for (int k = 0; k < cap; ++k) {
    const SignPattern pat = sign_pattern(F, u, opts.eps_z);
    const Index size = pat.size() - pat.free_count();
    if (size == 0) {
      tr.extinct = true;
      tr.status = FlowStatus::extinct;
      return;
    }
    const Subgradient sg = min_norm_for_pattern(F, pat);
    const double top = u.cwiseAbs().maxCoeff();
    double next_level = 0.0;
    for (Index i = 0; i < u.size(); ++i)
      if (pat.sign[std::size_t(i)] == 0) next_level = std::max(next_level, std::abs(u(i)));
    const double duration = (top - next_level) * double(size);
    Vector next = u - duration * sg.p;
    // The maximal set lands exactly on the next level, which merges it with that level.
    for (Index i = 0; i < u.size(); ++i)
      if (pat.sign[std::size_t(i)] != 0) next(i) = pat.sign[std::size_t(i)] * next_level;
    push_segment(tr, F, opts, sg.p, sg.q, duration, next);
    u = std::move(next);
  }
  tr.status = FlowStatus::event_cap;
  tr.log.push_back({int(tr.segments()), tr.final_time(), "abort", "event cap reached"});
}

// Sign pattern of u(t + h) for small h > 0: hard coordinates keep the sign of z,
// zero coordinates take -sign(w) unless w vanishes.
SignPattern probe_pattern(const SignPattern& hard, const Vector& w, double eps_w) {
  SignPattern next = hard;
  for (Index i = 0; i < w.size(); ++i) {
    if (hard.sign[std::size_t(i)] != 0) continue;
    if (w(i) > eps_w) next.sign[std::size_t(i)] = -1;
    else if (w(i) < -eps_w) next.sign[std::size_t(i)] = 1;
  }
  return next;
}

void run_polyhedral(Trajectory& tr, const Functional& F, const FlowOptions& opts) {
  const int cap = event_cap(F, opts);
  const double ext_tol = opts.extinction_rel * (1.0 + tr.f.norm());
  MinsubOptions mo;
  mo.eps_z = opts.eps_z;
  mo.qp = opts.qp;
  const Matrix& a = F.op();

  Vector u = tr.f;
  Vector warm_q;
  int fallbacks = 0;
  for (int k = 0; k < cap; ++k) {
    const Vector z = a * u;
    const SignPattern hard = sign_pattern(F, u, opts.eps_z);

    SignPattern pat = hard;
    std::set<std::vector<signed char>> visited{pat.sign};
    Subgradient sg;
    Vector w;
    bool consistent = false;
    for (int it = 0; it < opts.pattern_cap; ++it) {
      sg = min_norm_for_pattern(F, pat, mo, warm_q.size() ? &warm_q : nullptr);
      w = a * sg.p;
      const SignPattern next = probe_pattern(hard, w, zero_threshold(w, opts.eps_z));
      if (next == pat) {
        consistent = true;
        break;
      }
      if (!visited.insert(next.sign).second) break;
      tr.log.push_back({int(tr.segments()), tr.final_time(), "pattern",
                        "re-solved with " + std::to_string(next.free_count()) + " free coordinates"});
      pat = next;
    }

    if (sg.p.norm() <= ext_tol) {
      tr.extinct = true;
      tr.status = FlowStatus::extinct;
      return;
    }

    if (!consistent) {
      // Implicit Euler micro-step across the breakpoint; its slope is certified by the prox dual.
      const double h = 1e-6 * (1.0 + tr.f.norm()) / std::max(sg.p.norm(), ext_tol);
      const VPSolution vp = vp_solve(F, u, h, VpOptions{true, opts.qp});
      const Vector slope = (u - vp.v) / h;
      tr.log.push_back({int(tr.segments()), tr.final_time(), "fallback",
                        "pattern fixed point did not settle; Euler step h=" + std::to_string(h)});
      push_segment(tr, F, opts, slope, vp.q, h, vp.v);
      u = vp.v;
      warm_q = vp.q;
      if (++fallbacks > cap) break;
      continue;
    }

    const double eps = zero_threshold(z, opts.eps_z);
    double duration = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < z.size(); ++i) {
      if (std::abs(z(i)) <= eps) continue;
      if (z(i) * w(i) > 0.0) duration = std::min(duration, z(i) / w(i));
    }
    if (!std::isfinite(duration)) {
      tr.status = FlowStatus::stalled;
      tr.log.push_back({int(tr.segments()), tr.final_time(), "abort",
                        "nonzero slope but no coordinate approaches zero"});
      return;
    }
    Vector next = u - duration * sg.p;
    push_segment(tr, F, opts, sg.p, sg.q, duration, next);
    u = std::move(next);
    warm_q = sg.q;
  }
  tr.status = FlowStatus::event_cap;
  tr.log.push_back({int(tr.segments()), tr.final_time(), "abort", "event cap reached"});
}

}  // namespace

Trajectory run_event_driven(const Functional& F, const Vector& f, const FlowOptions& opts) {
  if (f.size() != F.dim()) throw DimensionError("run_event_driven: dimension mismatch");
  if (!f.allFinite()) throw PreconditionError("run_event_driven: datum must be finite");
  Trajectory tr(F);
  tr.f = f;
  tr.f_bar = nullspace_project(F, f);
  tr.times.push_back(0.0);
  tr.states.push_back(f);
  if (F.is_linf()) run_max_norm(tr, F, opts);
  else run_polyhedral(tr, F, opts);
  return tr;
}

SampledTrajectory run_implicit_euler(const Functional& F, const Vector& f, double dt,
                                     double t_max) {
  if (!(dt > 0.0)) throw PreconditionError("run_implicit_euler: dt must be positive");
  if (f.size() != F.dim()) throw DimensionError("run_implicit_euler: dimension mismatch");
  SampledTrajectory out;
  out.dt = dt;
  out.times.push_back(0.0);
  out.states.push_back(f);
  Vector u = f;
  Vector warm;
  const long steps = long(std::ceil(t_max / dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    VPSolution vp = vp_solve(F, u, dt, {}, warm.size() ? &warm : nullptr);
    if (vp.method == "dual box least squares") warm = vp.q * dt;
    u = std::move(vp.v);
    out.times.push_back(double(k) * dt);
    out.states.push_back(u);
  }
  return out;
}

std::pair<Vector, Vector> evaluate_at(const Trajectory& traj, double t) {
  if (t < 0.0) throw PreconditionError("evaluate_at: t must be nonnegative");
  const auto& ts = traj.times;
  if (t >= ts.back()) {
    if (traj.extinct) return {traj.f_bar, Vector::Zero(traj.f.size())};
    throw PreconditionError("evaluate_at: t lies beyond the computed part of the trajectory");
  }
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t k = std::size_t(it - ts.begin()) - 1;
  return {traj.states[k] - (t - ts[k]) * traj.slopes[k], traj.slopes[k]};
}

std::vector<DissipationRecord> dissipation_report(const Trajectory& traj, double tol) {
  std::vector<DissipationRecord> out;
  const Functional& F = traj.functional;
  for (Index k = 0; k < traj.segments(); ++k) {
    DissipationRecord r;
    const std::size_t s = std::size_t(k);
    r.segment = int(k);
    r.duration = traj.times[s + 1] - traj.times[s];
    r.j_start = F.value(traj.states[s]);
    r.j_end = F.value(traj.states[s + 1]);
    r.predicted = -r.duration * traj.slopes[s].squaredNorm();
    const double scale = std::max(std::abs(r.predicted), 1e-6 * r.j_start);
    r.rel_error = scale > 0.0 ? std::abs((r.j_end - r.j_start) - r.predicted) / scale : 0.0;
    r.ok = r.rel_error <= tol;
    out.push_back(r);
  }
  return out;
}

ShortTimeReport short_time_report(const Trajectory& traj, int samples) {
  ShortTimeReport rep;
  const Functional& F = traj.functional;
  if (traj.segments() == 0) return rep;
  double t = traj.times[1];
  for (int j = 0; j < samples; ++j) {
    t *= 0.5;
    const Vector u = evaluate_at(traj, t).first;
    rep.times.push_back(t);
    rep.values.push_back(F.value(traj.f - u));
  }
  rep.trend_checked = traj.all_eigenvectors();
  if (rep.trend_checked) {
    rep.decreasing = true;
    for (std::size_t j = 1; j < rep.values.size(); ++j)
      if (rep.values[j] > rep.values[j - 1] * (1.0 + 1e-12) + 1e-300) rep.decreasing = false;
  }
  return rep;
}

}  // namespace specflow
