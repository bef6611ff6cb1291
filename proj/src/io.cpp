#include "specflow/io.hpp"

#include "specflow/functionals.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specflow {

namespace {

std::string fmt_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(std::size_t(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(std::size_t(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float:
      out += fmt_double(j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) {
          out += nl;
          out += pad;
        }
        dump_rec(e, indent, depth + 1, out);
        first = false;
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        out += nl;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
        first = false;
      }
      out += nl;
      out += close_pad;
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += '\n';
  return out;
}

Vector parse_signal_csv(const std::string& text) {
  std::vector<double> vals;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const std::string cell = line.substr(b, line.find_first_of(",; \t\r", b) - b);
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw PreconditionError("signal CSV line " + std::to_string(lineno) + ": not a number: '" +
                              cell + "'");
    }
  }
  Vector v(Index(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(Index(i)) = vals[i];
  return Signal(v).values();
}

Vector parse_signal_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw PreconditionError(std::string("signal JSON: ") + e.what());
  }
  if (!j.is_array()) throw PreconditionError("signal JSON must be an array of numbers");
  Vector v(Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw PreconditionError("signal JSON entry " + std::to_string(i) + " is not a number");
    v(Index(i)) = j[i].get<double>();
  }
  return Signal(v).values();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

Vector read_signal(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (path.extension() == ".json") return parse_signal_json(text);
  return parse_signal_csv(text);
}

namespace {

Index positive_field(const Json& d, const char* key) {
  if (!d.contains(key) || !d[key].is_number_integer())
    throw PreconditionError(std::string("functional descriptor needs integer field '") + key + "'");
  const auto v = d[key].get<long long>();
  if (v < 1) throw PreconditionError(std::string("functional descriptor field '") + key + "' must be positive");
  return Index(v);
}

}  // namespace

Functional functional_from_json(const Json& d) {
  if (!d.is_object() || !d.contains("type") || !d["type"].is_string())
    throw PreconditionError("functional descriptor needs a string field 'type'");
  const std::string type = d["type"].get<std::string>();
  if (type == "tv1d") return tv1d(positive_field(d, "n"));
  if (type == "tv1d_dirichlet") return tv1d_dirichlet(positive_field(d, "n"));
  if (type == "l1") return l1(positive_field(d, "n"));
  if (type == "linf") return linf(positive_field(d, "n"));
  if (type == "grid_div")
    return grid_divergence({int(positive_field(d, "nx")), int(positive_field(d, "ny"))});
  if (type == "custom") {
    const Index m = positive_field(d, "m");
    const Index n = positive_field(d, "n");
    if (!d.contains("triplets") || !d["triplets"].is_array())
      throw PreconditionError("custom descriptor needs a 'triplets' array");
    Matrix a = Matrix::Zero(m, n);
    for (const auto& t : d["triplets"]) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
          !t[2].is_number())
        throw PreconditionError("custom triplets must be [row, col, value]");
      const auto i = t[0].get<long long>();
      const auto j = t[1].get<long long>();
      if (i < 0 || i >= m || j < 0 || j >= n)
        throw PreconditionError("custom triplet index out of range");
      a(Index(i), Index(j)) += t[2].get<double>();
    }
    return custom(a, d.value("name", std::string("custom")));
  }
  throw PreconditionError("unknown functional type '" + type + "'");
}

Functional read_functional(const std::filesystem::path& path) {
  try {
    return functional_from_json(Json::parse(read_text(path)));
  } catch (const Json::exception& e) {
    throw PreconditionError("functional descriptor " + path.string() + ": " + e.what());
  }
}

Json functional_descriptor(const Functional& F) {
  Json d;
  const std::string& name = F.name();
  if (F.is_linf() || F.structure() == Structure::tv1d || F.structure() == Structure::l1) {
    d["type"] = std::string(to_string(F.structure()));
    d["n"] = F.dim();
  } else if (name == "tv1d_dirichlet") {
    d["type"] = name;
    d["n"] = F.dim();
  } else if (F.structure() == Structure::grid_div && F.grid()) {
    d["type"] = "grid_div";
    d["nx"] = F.grid()->nx;
    d["ny"] = F.grid()->ny;
  } else {
    d["type"] = "custom";
    d["name"] = name;
    d["m"] = F.dual_dim();
    d["n"] = F.dim();
    Json trip = Json::array();
    const Matrix& a = F.op();
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j)
        if (a(i, j) != 0.0) trip.push_back(Json::array({i, j, a(i, j)}));
    d["triplets"] = trip;
  }
  return d;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

namespace {

Json vectors(const std::vector<Vector>& vs) {
  Json a = Json::array();
  for (const Vector& v : vs) a.push_back(to_json(v));
  return a;
}

}  // namespace

Json to_json(const Trajectory& traj) {
  Json j;
  j["functional"] = functional_descriptor(traj.functional);
  j["status"] = std::string(to_string(traj.status));
  j["extinct"] = traj.extinct;
  j["breakpoints"] = traj.times;
  j["states"] = vectors(traj.states);
  j["slopes"] = vectors(traj.slopes);
  j["certificates"] = vectors(traj.certificates);
  j["f_bar"] = to_json(traj.f_bar);
  Json checks = Json::array();
  for (const SegmentCheck& c : traj.checks)
    checks.push_back({{"certified", c.certified},
                      {"cert_residual", c.cert_residual},
                      {"face_gap", c.face_gap},
                      {"eigen_defect", c.eigen_defect},
                      {"eigenvector", c.eigenvector}});
  j["segment_checks"] = checks;
  Json log = Json::array();
  for (const FlowEvent& e : traj.log)
    log.push_back({{"segment", e.segment}, {"time", e.time}, {"kind", e.kind}, {"detail", e.detail}});
  j["events"] = log;
  return j;
}

Json to_json(const SpectralMeasure& mu) {
  Json j;
  j["source"] = mu.source;
  j["f_bar"] = to_json(mu.f_bar);
  Json atoms = Json::array();
  for (const Atom& a : mu.atoms) atoms.push_back({{"lambda", a.lambda}, {"mass", to_json(a.mass)}});
  j["atoms"] = atoms;
  j["reconstruction_error"] = reconstruction_error(mu);
  return j;
}

Json to_json(const ExtinctionReport& r) {
  Json j;
  j["t_star"] = r.t_star;
  j["dual_norm"] = r.dual_norm;
  j["poincare_c"] = r.poincare_c;
  j["poincare_certified"] = r.poincare_certified;
  j["upper_bound"] = r.upper_bound;
  j["lower_slack"] = r.lower_slack;
  j["upper_slack"] = r.upper_slack;
  j["profile"] = to_json(r.profile);
  j["profile_eigen_defect"] = r.profile_eigen_defect;
  j["profile_ratio"] = r.profile_ratio;
  j["identity_gap"] = r.identity_gap;
  j["normalized_profile_j"] = r.normalized_profile_j;
  j["profile_bound"] = r.profile_bound;
  j["trajectory_c"] = r.trajectory_c;
  j["certified"] = r.certified;
  j["ok"] = r.ok;
  return j;
}

std::string signal_csv(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    out += fmt_double(v(i));
    out += '\n';
  }
  return out;
}

std::string spectrum_csv(const SpectralMeasure& mu) {
  std::string out = "lambda,mass_norm\n";
  for (const Atom& a : mu.atoms) {
    out += fmt_double(a.lambda);
    out += ',';
    out += fmt_double(a.mass.norm());
    out += '\n';
  }
  return out;
}

}  // namespace specflow
