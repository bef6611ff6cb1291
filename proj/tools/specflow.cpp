#include "specflow/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace {

std::pair<double, double> parse_band(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw specflow::UsageError("--band expects lo,hi");
  try {
    const std::string hi = text.substr(comma + 1);
    return {std::stod(text.substr(0, comma)),
            hi == "inf" ? std::numeric_limits<double>::infinity() : std::stod(hi)};
  } catch (const std::invalid_argument&) {
    throw specflow::UsageError("--band expects two numbers, got '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("specflow");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("SPECFLOW_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));

  specflow::RunConfig cfg;
  std::string band;

  CLI::App app{"specflow: event-driven gradient flows of polyhedral one-homogeneous functionals and their spectra"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--functional", cfg.functional_path, "functional descriptor (JSON)")->required();
    sub->add_option("--input", cfg.inputs, "signal file(s), CSV or JSON array")->required();
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--tol", cfg.tol, "verification tolerance");
    sub->add_option("--eps-z", cfg.eps_z, "relative zero threshold for dual coordinates");
    sub->add_option("--max-events", cfg.max_events, "breakpoint cap (0 = 10 m)");
    sub->add_option("--workers", cfg.workers, "parallel runs for batch input");
    sub->add_option("--seed", cfg.seed, "random seed");
  };
  auto* dec = app.add_subcommand("decompose", "run the flow, write trajectory and spectrum");
  add_common(dec);
  auto* ver = app.add_subcommand("verify", "check the eigenvector and equivalence properties of a run");
  add_common(ver);
  auto* ext = app.add_subcommand("extinction", "extinction time, dual norm and profile");
  add_common(ext);
  auto* fil = app.add_subcommand("filter", "keep the spectral atoms inside a band");
  add_common(fil);
  fil->add_option("--band", band, "lo,hi (closed interval; hi may be inf)")->required();
  fil->add_flag("!--no-dc", cfg.include_dc, "drop the null-space component");
  auto* gal = app.add_subcommand("gallery", "write a named example signal and functional");
  gal->add_option("name", cfg.gallery_name, "fixture name")->required();
  gal->add_option("--out", cfg.out_dir, "output directory");
  gal->add_option("--seed", cfg.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? specflow::exit_ok : specflow::exit_usage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (!band.empty()) {
    try {
      cfg.band = parse_band(band);
    } catch (const specflow::UsageError& e) {
      spdlog::error("{}", e.what());
      return specflow::exit_usage;
    }
  }
  return specflow::run_command(cfg);
}
