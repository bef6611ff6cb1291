#pragma once

#include "specflow/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace specflow {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_verification = 3 };

/// Bad command-line input; maps to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::string functional_path;
  std::vector<std::string> inputs;
  std::string out_dir = ".";
  std::optional<std::pair<double, double>> band;
  bool include_dc = true;
  double tol = 1e-8;
  double eps_z = 1e-9;
  int max_events = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string gallery_name;
};

/// Throws UsageError on a malformed configuration.
void validate(const RunConfig& cfg);

struct GalleryEntry {
  std::string name;
  std::string description;
  Json functional;
  Vector signal;
};

std::vector<std::string> gallery_names();
/// Throws UsageError listing the known names when name is unknown.
GalleryEntry gallery_entry(const std::string& name, std::uint64_t seed = 0);

struct VerifyCheck {
  std::string name;
  bool asserted = false;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool flow_completed = false;
  bool all_asserted_pass() const;
};

/// Runs the flow and every theorem check on it.
VerifyReport verify_run(const Functional& F, const Vector& f, const FlowOptions& opts, double tol);
Json to_json(const VerifyReport& rep);

int cmd_decompose(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_extinction(const RunConfig& cfg);
int cmd_filter(const RunConfig& cfg);
int cmd_gallery(const RunConfig& cfg);

/// Validates cfg and dispatches on cfg.command, translating exceptions to exit codes.
int run_command(const RunConfig& cfg);

}  // namespace specflow
