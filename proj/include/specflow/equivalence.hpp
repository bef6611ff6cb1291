#pragma once

#include "specflow/flow.hpp"
#include "specflow/prox.hpp"

#include <vector>

namespace specflow {

struct GfVpComparison {
  std::vector<double> times;
  /// ||u_GF(t) - v_VP(t)|| per sample.
  std::vector<double> deviations;
  double max_deviation = 0.0;
  /// Whether the flow satisfies the decomposition condition, the hypothesis under which u = v.
  bool hypothesis_holds = false;
};

/// Compares the flow with the prox path v(t) = prox_{tJ}(f) at the sample times.
GfVpComparison compare_gf_vp(const Trajectory& traj, const std::vector<double>& sample_ts);
GfVpComparison compare_gf_vp(const Functional& F, const Vector& f,
                             const std::vector<double>& sample_ts, const FlowOptions& opts = {});

struct IssState {
  double tau = 0.0;
  /// w(tau) = u(1/tau) + (1/tau) p(1/tau).
  Vector w;
  /// r(tau) = tau (f - u(1/tau)), the time average of p over [0, 1/tau].
  Vector r;
  /// 1/tau lies at or beyond the extinction time, where u = f_bar and p = 0.
  bool past_extinction = false;
};

/// Inverse scale space pair at tau read off the flow with t = 1/tau (right derivative at breakpoints).
IssState iss_from_gf(const Trajectory& traj, double tau);

struct IssCheck {
  bool member = false;
  /// |<r, w> - J(w)|.
  double gap = 0.0;
  bool ok = false;
};

/// r in dJ(w): r in K and <r, w> = J(w) to tol (1 + J(w)).
IssCheck iss_residual_check(const Functional& F, const Vector& w, const Vector& r, double tol = 1e-8);

/// || (r(tau + dtau) - r(tau)) / dtau - (f - w(tau)) ||.
double iss_flow_residual(const Trajectory& traj, double tau, double dtau);

}  // namespace specflow
