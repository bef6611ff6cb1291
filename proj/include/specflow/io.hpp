#pragma once

#include "specflow/extinction.hpp"
#include "specflow/flow.hpp"
#include "specflow/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace specflow {

using Json = nlohmann::json;

/// One value per line; blank lines and lines starting with '#' are skipped.
Vector parse_signal_csv(const std::string& text);
/// A flat JSON array of numbers.
Vector parse_signal_json(const std::string& text);
/// Dispatches on the extension (.json, otherwise CSV).
Vector read_signal(const std::filesystem::path& path);

/// {"type":"tv1d","n":...}, {"type":"grid_div","nx":..,"ny":..}, {"type":"l1"|"linf"|"tv1d_dirichlet","n":..}
/// or {"type":"custom","m":..,"n":..,"triplets":[[i,j,v],...]} with zero-based indices.
Functional functional_from_json(const Json& desc);
Functional read_functional(const std::filesystem::path& path);
Json functional_descriptor(const Functional& F);

/// Serializes with every double printed to 17 significant digits; non-finite values become null.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const Vector& v);
Json to_json(const Trajectory& traj);
Json to_json(const SpectralMeasure& mu);
Json to_json(const ExtinctionReport& rep);

/// One value per line, 17 significant digits.
std::string signal_csv(const Vector& v);
/// "lambda,mass_norm" rows.
std::string spectrum_csv(const SpectralMeasure& mu);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace specflow
