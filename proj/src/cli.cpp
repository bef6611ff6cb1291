#include "specflow/cli.hpp"

#include "specflow/equivalence.hpp"
#include "specflow/extinction.hpp"
#include "specflow/functionals.hpp"
#include "specflow/minsub.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <thread>

namespace specflow {

namespace fs = std::filesystem;

void validate(const RunConfig& cfg) {
  static const std::vector<std::string> commands{"decompose", "verify", "extinction", "filter", "gallery"};
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
    throw UsageError("unknown command '" + cfg.command + "'");
  if (!(cfg.tol > 0.0) || !(cfg.eps_z > 0.0)) throw UsageError("tolerances must be positive");
  if (cfg.workers < 1) throw UsageError("--workers must be at least 1");
  if (cfg.max_events < 0) throw UsageError("--max-events must be nonnegative");
  if (cfg.command == "gallery") {
    if (cfg.gallery_name.empty()) throw UsageError("gallery needs a fixture name");
    return;
  }
  if (cfg.functional_path.empty()) throw UsageError("--functional is required");
  if (cfg.inputs.empty()) throw UsageError("--input is required");
  if (cfg.command == "filter") {
    if (!cfg.band) throw UsageError("filter needs --band lo,hi");
    if (cfg.band->first > cfg.band->second) throw UsageError("--band needs lo <= hi");
  }
}

bool VerifyReport::all_asserted_pass() const {
  if (!flow_completed) return false;
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck& c) { return !c.asserted || c.passed; });
}

std::vector<std::string> gallery_names() {
  return {"tv-step4", "tv-two-scale", "minsub-random", "bf-hat", "linf-pair", "l1-spike"};
}

GalleryEntry gallery_entry(const std::string& name, std::uint64_t seed) {
  GalleryEntry e;
  e.name = name;
  if (name == "tv-step4") {
    e.description = "eigenvector step of total variation, lambda = 1/2";
    e.functional = {{"type", "tv1d"}, {"n", 4}};
    e.signal = (Vector(4) << 1, 1, -1, -1).finished();
  } else if (name == "tv-two-scale") {
    e.description = "step with two jump heights; the inner plateaus merge first";
    e.functional = {{"type", "tv1d"}, {"n", 8}};
    e.signal = (Vector(8) << 3, 3, 1, 1, -1, -1, -3, -3).finished();
  } else if (name == "minsub-random") {
    e.description = "Gaussian datum for total variation on 16 nodes";
    e.functional = {{"type", "tv1d"}, {"n", 16}};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    e.signal = Vector(16);
    for (Index i = 0; i < 16; ++i) e.signal(i) = normal(rng);
  } else if (name == "bf-hat") {
    e.description = "hat of height 1 on [1/4, 3/4], 256 cells of width 1/256, zero outside";
    e.functional = {{"type", "tv1d_dirichlet"}, {"n", 256}};
    e.signal = Vector(256);
    for (Index i = 0; i < 256; ++i) {
      const double x = (double(i) + 0.5) / 256.0;
      e.signal(i) = std::max(0.0, 1.0 - std::abs(x - 0.5) / 0.25);
    }
  } else if (name == "linf-pair") {
    e.description = "max-norm flow: level 3 decays to level 1, then both decay together";
    e.functional = {{"type", "linf"}, {"n", 2}};
    e.signal = (Vector(2) << 3, 1).finished();
  } else if (name == "l1-spike") {
    e.description = "l1 flow, componentwise soft shrinkage";
    e.functional = {{"type", "l1"}, {"n", 3}};
    e.signal = (Vector(3) << 2, -1, 0).finished();
  } else {
    std::string known;
    for (const std::string& n : gallery_names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown gallery fixture '" + name + "'; known fixtures: " + known);
  }
  return e;
}

namespace {

FlowOptions flow_options(const RunConfig& cfg) {
  FlowOptions o;
  o.eps_z = cfg.eps_z;
  o.max_events = cfg.max_events;
  return o;
}

bool eigen_theory_applies(const Functional& F) {
  const Structure s = F.structure();
  return s == Structure::tv1d || s == Structure::l1 || s == Structure::linf;
}

std::vector<double> interior_samples(double t_end, int count) {
  std::vector<double> ts;
  for (int i = 1; i <= count; ++i) ts.push_back(t_end * double(i) / double(count + 1));
  return ts;
}

}  // namespace

VerifyReport verify_run(const Functional& F, const Vector& f, const FlowOptions& opts, double tol) {
  VerifyReport rep;
  const Trajectory traj = run_event_driven(F, f, opts);
  rep.flow_completed = traj.extinct;
  const bool theory = eigen_theory_applies(F);
  auto add = [&rep](std::string name, bool asserted, bool passed, double measured, double tolerance,
                    std::string note = {}) {
    rep.checks.push_back({std::move(name), asserted, passed, measured, tolerance, std::move(note)});
  };

  double eig = 0.0;
  double minsub = 0.0;
  for (Index k = 0; k < traj.segments(); ++k) {
    const std::size_t s = std::size_t(k);
    const Vector& p = traj.slopes[s];
    eig = std::max(eig, std::abs(F.value(p) - p.squaredNorm()) / std::max(1.0, p.squaredNorm()));
    const MinsubCheck mc =
        check_minsub(F, traj.states[s], Subgradient{p, traj.certificates[s], 0.0}, tol, opts.eps_z);
    minsub = std::max(minsub, mc.worst / std::max(1.0, p.squaredNorm()));
  }
  const std::string unproven = theory ? "" : "reported only: no eigenvector guarantee for this operator";
  add("eigenvector_segments", theory, eig <= tol, eig, tol, unproven);
  add("minsub", theory, minsub <= tol, minsub, tol, unproven);

  bool certified = true;
  for (const SegmentCheck& c : traj.checks) certified = certified && c.certified;
  add("segment_certificates", true, certified && traj.checks.size() == traj.slopes.size(),
      certified ? 0.0 : 1.0, 0.0);

  double mono = 0.0;
  for (Index k = 1; k < traj.segments(); ++k)
    mono = std::max(mono, traj.slopes[std::size_t(k)].norm() - traj.slopes[std::size_t(k - 1)].norm());
  for (std::size_t k = 1; k < traj.states.size(); ++k)
    mono = std::max(mono, F.value(traj.states[k]) - F.value(traj.states[k - 1]));
  const double mono_tol = 1e-9 * (1.0 + F.value(f));
  add("monotonicity", true, mono <= mono_tol, mono, mono_tol);

  double mass = 0.0;
  for (const Vector& u : traj.states) mass = std::max(mass, (nullspace_project(F, u) - traj.f_bar).norm());
  add("mass_conservation", true, mass <= 1e-9 * (1.0 + f.norm()), mass, 1e-9 * (1.0 + f.norm()));

  double diss = 0.0;
  for (const DissipationRecord& d : dissipation_report(traj, tol)) diss = std::max(diss, d.rel_error);
  add("dissipation", true, diss <= tol, diss, tol);

  if (!traj.extinct) return rep;

  const SpectralMeasure mu = spectral_measure(traj);
  const double rec_tol = 1e-9 * (1.0 + f.norm());
  const double rec = reconstruction_error(mu);
  add("reconstruction", true, rec <= rec_tol, rec, rec_tol);

  const bool eigen_flow = traj.all_eigenvectors(tol);
  const OrthogonalityReport orth = orthogonality_report(traj, tol, 0);
  add("orthogonality", eigen_flow, orth.ok, orth.max_violation / std::max(1.0, orth.scale), tol);

  const DecompositionReport dec = verify_decomposition_condition(traj);
  add("hierarchy", eigen_flow, dec.hierarchy.ok, dec.hierarchy.worst, 1e-8);

  if (traj.final_time() > 0.0) {
    const GfVpComparison cmp = compare_gf_vp(traj, interior_samples(traj.final_time() * 1.25, 9));
    add("gf_equals_vp", dec.ok, cmp.max_deviation <= 1e-6 * (1.0 + f.norm()), cmp.max_deviation,
        1e-6 * (1.0 + f.norm()));

    double iss = 0.0;
    bool iss_ok = true;
    for (double t : interior_samples(traj.final_time() * 1.25, 9)) {
      const IssState s = iss_from_gf(traj, 1.0 / t);
      const IssCheck c = iss_residual_check(F, s.w, s.r, tol);
      iss = std::max(iss, c.gap / (1.0 + F.value(s.w)));
      iss_ok = iss_ok && c.ok;
    }
    add("iss_inclusion", dec.ok, iss_ok, iss, tol);
  }

  const ExtinctionReport ext = extinction_identities(F, f, traj);
  add("extinction_lower_bound", true, ext.lower_slack >= -1e-7, ext.lower_slack, 1e-7);
  add("extinction_upper_bound", ext.poincare_certified, ext.upper_slack >= -1e-7, ext.upper_slack, 1e-7,
      ext.poincare_certified ? "" : "ground state not certified at this size");
  if (traj.segments() > 0)
    add("extinction_identity", ext.certified, ext.identity_gap <= 1e-8 * ext.t_star, ext.identity_gap,
        1e-8 * ext.t_star);
  return rep;
}

Json to_json(const VerifyReport& rep) {
  Json checks = Json::array();
  for (const VerifyCheck& c : rep.checks) {
    Json j{{"name", c.name},
           {"asserted", c.asserted},
           {"passed", c.passed},
           {"measured", c.measured},
           {"tolerance", c.tolerance}};
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(j);
  }
  return {{"flow_completed", rep.flow_completed},
          {"all_asserted_pass", rep.all_asserted_pass()},
          {"checks", checks}};
}

namespace {

struct RunOutput {
  int code = exit_ok;
  std::vector<std::pair<fs::path, std::string>> files;
  std::string console;
};

using PerInput = std::function<RunOutput(const Functional&, const Vector&, const fs::path&)>;

int classify(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e))
    return exit_usage;
  return exit_numerical;
}

// Runs one job per input on a worker pool, then writes results in input order.
int run_batch(const RunConfig& cfg, const PerInput& job) {
  const Functional F = read_functional(cfg.functional_path);
  const std::size_t count = cfg.inputs.size();
  std::vector<RunOutput> results(count);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      const fs::path in = cfg.inputs[i];
      const fs::path dir = count == 1 ? fs::path(cfg.out_dir)
                                      : fs::path(cfg.out_dir) / (std::to_string(i) + "_" + in.stem().string());
      try {
        const Vector f = read_signal(in);
        if (f.size() != F.dim())
          throw DimensionError("input " + in.string() + " has " + std::to_string(f.size()) +
                               " values, functional expects " + std::to_string(F.dim()));
        results[i] = job(F, f, dir);
      } catch (const std::exception& e) {
        results[i].code = classify(e);
        errors[i] = in.string() + ": " + e.what();
      }
    }
  };
  const int nthreads = int(std::min<std::size_t>(std::size_t(cfg.workers), count));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  int code = exit_ok;
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i].empty()) spdlog::error("{}", errors[i]);
    for (const auto& [path, text] : results[i].files) write_text(path, text);
    std::fputs(results[i].console.c_str(), stdout);
    code = std::max(code, results[i].code);
  }
  return code;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

int cmd_decompose(const RunConfig& cfg) {
  const FlowOptions opts = flow_options(cfg);
  return run_batch(cfg, [&](const Functional& F, const Vector& f, const fs::path& dir) {
    RunOutput out;
    const Trajectory traj = run_event_driven(F, f, opts);
    out.files.emplace_back(dir / "trajectory.json", dump_json(to_json(traj)));
    if (!traj.extinct) {
      spdlog::warn("flow stopped before extinction ({}) after {} segments", to_string(traj.status),
                   traj.segments());
      out.code = exit_numerical;
      return out;
    }
    const SpectralMeasure mu = spectral_measure(traj);
    out.files.emplace_back(dir / "spectrum.json", dump_json(to_json(mu)));
    out.files.emplace_back(dir / "spectrum.csv", spectrum_csv(mu));
    spdlog::info("{}: {} segments, {} atoms, T* = {}", dir.string(), traj.segments(), mu.atoms.size(),
                 traj.final_time());
    return out;
  });
}

int cmd_verify(const RunConfig& cfg) {
  const FlowOptions opts = flow_options(cfg);
  return run_batch(cfg, [&](const Functional& F, const Vector& f, const fs::path& dir) {
    RunOutput out;
    const VerifyReport rep = verify_run(F, f, opts, cfg.tol);
    out.files.emplace_back(dir / "verify.json", dump_json(to_json(rep)));
    for (const VerifyCheck& c : rep.checks)
      out.console += std::string(c.asserted ? (c.passed ? "PASS " : "FAIL ") : "info ") + c.name +
                     " measured=" + fmt17(c.measured) + " tol=" + fmt17(c.tolerance) + "\n";
    if (!rep.flow_completed) out.code = exit_numerical;
    else if (!rep.all_asserted_pass()) out.code = exit_verification;
    return out;
  });
}

int cmd_extinction(const RunConfig& cfg) {
  const FlowOptions opts = flow_options(cfg);
  return run_batch(cfg, [&](const Functional& F, const Vector& f, const fs::path& dir) {
    RunOutput out;
    const Trajectory traj = run_event_driven(F, f, opts);
    if (!traj.extinct) {
      out.code = exit_numerical;
      out.files.emplace_back(dir / "trajectory.json", dump_json(to_json(traj)));
      return out;
    }
    GroundStateOptions go;
    go.seed = cfg.seed;
    const ExtinctionReport rep = extinction_identities(F, f, traj, go);
    out.files.emplace_back(dir / "extinction.json", dump_json(to_json(rep)));
    out.console = "||f||_* = " + fmt17(rep.dual_norm) + "  <=  T* = " + fmt17(rep.t_star) +
                  "  <=  C ||f - f_bar|| = " + fmt17(rep.upper_bound) +
                  (rep.poincare_certified ? "" : "  (C from best-found ground state)") + "\n" +
                  "<f, p*> / J(p*) = " + fmt17(rep.profile_ratio) +
                  "   profile eigen defect = " + fmt17(rep.profile_eigen_defect) + "\n";
    if (!rep.ok) out.code = exit_verification;
    return out;
  });
}

int cmd_filter(const RunConfig& cfg) {
  const FlowOptions opts = flow_options(cfg);
  return run_batch(cfg, [&](const Functional& F, const Vector& f, const fs::path& dir) {
    RunOutput out;
    const Trajectory traj = run_event_driven(F, f, opts);
    if (!traj.extinct) {
      out.code = exit_numerical;
      return out;
    }
    const SpectralMeasure mu = spectral_measure(traj);
    out.files.emplace_back(dir / "filtered.csv",
                           signal_csv(band_filter(mu, cfg.band->first, cfg.band->second, cfg.include_dc)));
    return out;
  });
}

int cmd_gallery(const RunConfig& cfg) {
  const GalleryEntry e = gallery_entry(cfg.gallery_name, cfg.seed);
  const fs::path dir(cfg.out_dir);
  write_text(dir / "signal.csv", signal_csv(e.signal));
  write_text(dir / "functional.json", dump_json(e.functional));
  spdlog::info("{}: {} ({} values)", e.name, e.description, e.signal.size());
  return exit_ok;
}

int run_command(const RunConfig& cfg) {
  try {
    validate(cfg);
    if (cfg.command == "decompose") return cmd_decompose(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "extinction") return cmd_extinction(cfg);
    if (cfg.command == "filter") return cmd_filter(cfg);
    return cmd_gallery(cfg);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return classify(e);
  }
}

}  // namespace specflow
