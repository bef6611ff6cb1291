#pragma once

#include "specflow/box_qp.hpp"
#include "specflow/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace specflow {

struct FlowOptions {
  /// Breakpoint cap; 0 selects max(10 m, 20).
  int max_events = 0;
  double eps_z = 1e-9;
  BoxLsqOptions qp;
  bool verify_each_segment = true;
  /// Cap on sign-pattern re-solves at one breakpoint before the Euler fallback.
  int pattern_cap = 64;
  /// p is treated as zero once ||p|| <= extinction_rel (1 + ||f||).
  double extinction_rel = 1e-10;
};

enum class FlowStatus { extinct, event_cap, stalled };

std::string_view to_string(FlowStatus s);

struct FlowEvent {
  int segment = 0;
  double time = 0.0;
  /// "pattern" (re-solve at a breakpoint), "fallback" (Euler micro-step) or "abort".
  std::string kind;
  std::string detail;
};

/// Per-segment verification of p_k in dJ(u(t)) and of the eigenvector identity.
struct SegmentCheck {
  bool certified = false;
  /// ||A^T q_k - p_k||.
  double cert_residual = 0.0;
  /// |<p_k, u_mid> - J(u_mid)| at the segment midpoint.
  double face_gap = 0.0;
  /// J(p_k) - ||p_k||^2.
  double eigen_defect = 0.0;
  bool eigenvector = false;
};

/// Exact piecewise-linear gradient flow: u(t) = u_k - (t - t_k) p_k on [t_k, t_{k+1}).
class Trajectory {
 public:
  explicit Trajectory(Functional f) : functional(std::move(f)) {}

  Functional functional;
  Vector f;
  Vector f_bar;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> slopes;
  std::vector<Vector> certificates;
  /// Filled when FlowOptions::verify_each_segment is set.
  std::vector<SegmentCheck> checks;
  bool extinct = false;
  FlowStatus status = FlowStatus::stalled;
  std::vector<FlowEvent> log;

  Index segments() const { return Index(slopes.size()); }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }
  /// Every segment verified and an eigenvector with defect <= tol max(1, ||p||^2).
  bool all_eigenvectors(double tol = 1e-8) const;
};

/// Integrates du/dt = -A^0 u exactly, event to event, starting from f.
Trajectory run_event_driven(const Functional& F, const Vector& f, const FlowOptions& opts = {});

struct SampledTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Vector> states;
};

/// Minimizing movements u_{k+1} = prox_{dt J}(u_k) up to t_max (inclusive of the last step).
SampledTrajectory run_implicit_euler(const Functional& F, const Vector& f, double dt,
                                     double t_max);

/// (u(t), p(t)) with p right-continuous. Beyond extinction returns (f_bar, 0).
std::pair<Vector, Vector> evaluate_at(const Trajectory& traj, double t);

struct DissipationRecord {
  int segment = 0;
  double duration = 0.0;
  double j_start = 0.0;
  double j_end = 0.0;
  /// -(t_{k+1} - t_k) ||p_k||^2.
  double predicted = 0.0;
  double rel_error = 0.0;
  bool ok = false;
};

/// Checks J(u_{k+1}) - J(u_k) = -(t_{k+1} - t_k) ||p_k||^2 segment by segment.
std::vector<DissipationRecord> dissipation_report(const Trajectory& traj, double tol = 1e-8);

struct ShortTimeReport {
  std::vector<double> times;
  /// J(f - u(t)) at each time, times decreasing.
  std::vector<double> values;
  bool trend_checked = false;
  bool decreasing = false;
};

/// Samples J(f - u(t)) on t = t_1 2^{-j}; the trend is asserted only on eigenvector flows.
ShortTimeReport short_time_report(const Trajectory& traj, int samples = 12);

}  // namespace specflow
