#include "specflow/equivalence.hpp"

#include "specflow/spectral.hpp"

#include <algorithm>

namespace specflow {

GfVpComparison compare_gf_vp(const Trajectory& traj, const std::vector<double>& sample_ts) {
  GfVpComparison out;
  out.hypothesis_holds = traj.extinct && verify_decomposition_condition(traj).ok;
  for (double t : sample_ts) {
    if (!(t > 0.0)) throw PreconditionError("compare_gf_vp: sample times must be positive");
    const Vector u = evaluate_at(traj, t).first;
    const VPSolution v = vp_solve(traj.functional, traj.f, t);
    const double d = (u - v.v).norm();
    out.times.push_back(t);
    out.deviations.push_back(d);
    out.max_deviation = std::max(out.max_deviation, d);
  }
  return out;
}

GfVpComparison compare_gf_vp(const Functional& F, const Vector& f,
                             const std::vector<double>& sample_ts, const FlowOptions& opts) {
  return compare_gf_vp(run_event_driven(F, f, opts), sample_ts);
}

IssState iss_from_gf(const Trajectory& traj, double tau) {
  if (!(tau > 0.0)) throw PreconditionError("iss_from_gf: tau must be positive");
  const double t = 1.0 / tau;
  IssState s;
  s.tau = tau;
  s.past_extinction = traj.extinct && t >= traj.final_time();
  const auto [u, p] = evaluate_at(traj, t);
  s.w = u + t * p;
  s.r = tau * (traj.f - u);
  return s;
}

IssCheck iss_residual_check(const Functional& F, const Vector& w, const Vector& r, double tol) {
  IssCheck c;
  c.member = membership_in_K(F, r).member();
  const double jw = F.value(w);
  c.gap = std::abs(r.dot(w) - jw);
  c.ok = c.member && c.gap <= tol * (1.0 + jw);
  return c;
}

double iss_flow_residual(const Trajectory& traj, double tau, double dtau) {
  const IssState a = iss_from_gf(traj, tau);
  const IssState b = iss_from_gf(traj, tau + dtau);
  return ((b.r - a.r) / dtau - (traj.f - a.w)).norm();
}

}  // namespace specflow
