// Field files, run configuration and report writers.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpmetric/geodesic.hpp"

#ifndef GPMETRIC_VERSION
#define GPMETRIC_VERSION "0.1.0"
#endif

namespace gpmetric {

inline std::string version() { return std::string("gpmetric ") + GPMETRIC_VERSION; }

/// Malformed configuration or field file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

using json = nlohmann::json;

/// %.17g, enough digits to round-trip any double.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Field files

inline std::vector<std::string> component_names(int dim, const std::string& kind) {
  if (kind == "scalar") return {"f"};
  if (kind == "vector") {
    std::vector<std::string> out;
    for (int i = 0; i < dim; ++i) out.push_back("v_" + std::to_string(i));
    return out;
  }
  if (dim == 1) return {"g_00"};
  return {"g_00", "g_01", "g_11"};
}

namespace detail {

inline std::string number_array(const double* v, std::size_t n) {
  std::string s = "[";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s + "]";
}

inline std::string field_header(const Grid& grid, const std::string& kind) {
  std::string s = "{\"version\":\"" + version() + "\",\"dim\":" + std::to_string(grid.dim) + ",\"shape\":[";
  for (int i = 0; i < grid.dim; ++i) s += (i ? "," : "") + std::to_string(grid.shape[i]);
  s += "],\"lengths\":[";
  for (int i = 0; i < grid.dim; ++i) s += (i ? "," : "") + format_double(grid.lengths[i]);
  return s + "],\"kind\":\"" + kind + "\",\"components\":{";
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace detail

/// Serialises a symmetric field; kind is "metric" or "sym2".
inline std::string field_to_string(const SymField& f, const std::string& kind = "sym2") {
  const auto names = component_names(f.grid().dim, kind);
  std::string s = detail::field_header(f.grid(), kind);
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) s += ',';
    s += "\"" + names[c] + "\":" + detail::number_array(f.component(static_cast<int>(c)), f.points());
  }
  return s + "}}\n";
}

inline std::string field_to_string(const ScalarField& f) {
  std::string s = detail::field_header(f.grid, "scalar");
  s += "\"f\":" + detail::number_array(f.values.data(), f.values.size());
  return s + "}}\n";
}

inline void write_field(const std::filesystem::path& path, const SymField& f, const std::string& kind = "sym2") {
  detail::write_text(path, field_to_string(f, kind));
}

inline void write_field(const std::filesystem::path& path, const ScalarField& f) {
  detail::write_text(path, field_to_string(f));
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

namespace detail {

template <class T>
T require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(where + ": \"" + key + "\" has the wrong type (" + e.what() + ")");
  }
}

template <class T>
T optional_value(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return require<T>(j, key, where);
}

inline Grid grid_from_json(const json& j, const std::string& where) {
  const int dim = require<int>(j, "dim", where);
  const auto shape = require<std::vector<int>>(j, "shape", where);
  const auto lengths = require<std::vector<double>>(j, "lengths", where);
  if (static_cast<int>(shape.size()) != dim || static_cast<int>(lengths.size()) != dim)
    throw SchemaError(where + ": shape and lengths must have dim entries");
  try {
    return build_grid(dim, std::span<const int>(shape), std::span<const double>(lengths));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

}  // namespace detail

/// Parses a symmetric-field file ("metric" or "sym2").
inline SymField field_from_json(const json& j, const std::string& where = "field") {
  const Grid grid = detail::grid_from_json(j, where);
  const auto kind = detail::require<std::string>(j, "kind", where);
  if (kind != "metric" && kind != "sym2") throw SchemaError(where + ": expected kind metric or sym2, got " + kind);
  const auto names = component_names(grid.dim, kind);
  const json comps = detail::require<json>(j, "components", where);
  SymField f(grid);
  for (std::size_t c = 0; c < names.size(); ++c) {
    const auto v = detail::require<std::vector<double>>(comps, names[c], where + ".components");
    if (v.size() != grid.size()) throw SchemaError(where + ": component " + names[c] + " has the wrong length");
    std::copy(v.begin(), v.end(), f.component(static_cast<int>(c)));
  }
  return f;
}

inline SymField read_field(const std::filesystem::path& path) {
  return field_from_json(read_json_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Operator and run configuration

inline PhiFunction phi_from_json(const json& j, const std::string& where) {
  const auto kind = detail::require<std::string>(j, "kind", where);
  try {
    if (kind == "power") return PhiFunction::power(detail::require<double>(j, "k", where));
    if (kind == "affine_exp")
      return PhiFunction::affine_exp(detail::require<double>(j, "a", where), detail::require<double>(j, "b", where));
    if (kind == "polynomial") return PhiFunction::polynomial(detail::require<std::vector<double>>(j, "coeffs", where));
    if (kind == "constant") return PhiFunction::constant(detail::require<double>(j, "c", where));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": unknown phi kind \"" + kind + "\"");
}

inline json phi_to_json(const PhiFunction& phi) {
  switch (phi.kind) {
    case PhiFunction::Kind::power:
      return {{"kind", "power"}, {"k", phi.exponent}};
    case PhiFunction::Kind::affine_exp:
      return {{"kind", "affine_exp"}, {"a", phi.a}, {"b", phi.b}};
    case PhiFunction::Kind::polynomial:
      return {{"kind", "polynomial"}, {"coeffs", phi.coeffs}};
  }
  return {};
}

inline OperatorSpec operator_from_json(const json& j, const std::string& where = "operator") {
  const auto family = detail::require<std::string>(j, "family", where);
  OperatorSpec P;
  try {
    if (family == "identity")
      P = OperatorSpec::identity();
    else if (family == "conformal")
      P = OperatorSpec::conformal(phi_from_json(detail::require<json>(j, "phi", where), where + ".phi"));
    else if (family == "curvature") {
      P = OperatorSpec::curvature(phi_from_json(detail::require<json>(j, "phi", where), where + ".phi"));
      P.literal_curvature_adjoint = detail::optional_value<bool>(j, "literal_adjoint", false, where);
    } else if (family == "sobolev")
      P = OperatorSpec::sobolev(detail::require<int>(j, "p", where));
    else
      throw SchemaError(where + ": unknown family \"" + family + "\"");
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
  P.solver_tol = detail::optional_value<double>(j, "solver_tol", P.solver_tol, where);
  return P;
}

inline json operator_to_json(const OperatorSpec& P) {
  json j = {{"family", family_name(P.family)}};
  if (P.family == OperatorSpec::Family::conformal || P.family == OperatorSpec::Family::curvature)
    j["phi"] = phi_to_json(P.phi);
  if (P.family == OperatorSpec::Family::sobolev) j["p"] = P.p;
  return j;
}

/// Named generator for an initial field, with its parameters.
struct FieldSpec {
  std::string generator;
  std::optional<std::uint64_t> seed;
  double amplitude = 0.2;
  int max_mode = 1;
  double scale = 1.0;
  std::vector<double> values;
  std::string path;
};

struct RunConfig {
  int dim = 2;
  int points = 16;
  double length = 2 * 3.14159265358979323846;
  OperatorSpec op;
  FieldSpec metric{"flat"};
  FieldSpec velocity{"zero"};
  FieldSpec target{"none"};
  FieldSpec second{"none"};
  IntegratorOptions integrator;
  /// Gate applied by the command (energy drift, log residual, curl mismatch, ...).
  std::optional<double> gate_tol;
  std::string out_dir = "out";

  Grid grid() const { return square_grid(dim, points, length); }
};

namespace detail {

inline FieldSpec field_spec_from_json(const json& j, const std::string& where,
                                      const std::vector<std::string>& generators) {
  FieldSpec s;
  s.generator = require<std::string>(j, "generator", where);
  if (std::find(generators.begin(), generators.end(), s.generator) == generators.end())
    throw SchemaError(where + ": unknown generator \"" + s.generator + "\"");
  if (j.contains("seed")) s.seed = require<std::uint64_t>(j, "seed", where);
  s.amplitude = optional_value<double>(j, "amplitude", s.amplitude, where);
  s.max_mode = optional_value<int>(j, "max_mode", s.max_mode, where);
  s.scale = optional_value<double>(j, "scale", s.scale, where);
  s.values = optional_value<std::vector<double>>(j, "values", s.values, where);
  s.path = optional_value<std::string>(j, "path", s.path, where);
  if ((s.generator == "random" || s.generator == "random_metric") && !s.seed)
    throw SchemaError(where + ": generator \"" + s.generator + "\" needs a seed");
  if (s.generator == "file" && s.path.empty()) throw SchemaError(where + ": generator \"file\" needs a path");
  if (s.generator == "constant" && s.values.empty()) throw SchemaError(where + ": generator \"constant\" needs values");
  return s;
}

}  // namespace detail

inline const std::vector<std::string>& metric_generators() {
  static const std::vector<std::string> g{"flat", "random", "conformal", "file"};
  return g;
}

inline const std::vector<std::string>& tangent_generators() {
  static const std::vector<std::string> g{"zero", "metric", "random", "random_metric", "constant", "file"};
  return g;
}

inline RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("config: top level must be an object");
  static const std::vector<std::string> known{"grid",   "operator", "initial_metric", "initial_velocity", "target",
                                              "second", "integrator", "tolerances", "output", "version"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw SchemaError("config: unknown key \"" + it.key() + "\"");
  RunConfig c;
  const json grid = detail::require<json>(j, "grid", "config");
  c.dim = detail::optional_value<int>(grid, "dim", c.dim, "grid");
  c.points = detail::require<int>(grid, "points", "grid");
  c.length = detail::optional_value<double>(grid, "length", c.length, "grid");
  if (c.dim < 1 || c.dim > 2 || c.points < 4 || !(c.length > 0.0))
    throw SchemaError("grid: need dim in {1,2}, points >= 4 and length > 0");
  c.op = operator_from_json(detail::require<json>(j, "operator", "config"));
  if (j.contains("initial_metric"))
    c.metric = detail::field_spec_from_json(j.at("initial_metric"), "initial_metric", metric_generators());
  if (j.contains("initial_velocity"))
    c.velocity = detail::field_spec_from_json(j.at("initial_velocity"), "initial_velocity", tangent_generators());
  if (j.contains("target")) c.target = detail::field_spec_from_json(j.at("target"), "target", metric_generators());
  if (j.contains("second")) c.second = detail::field_spec_from_json(j.at("second"), "second", tangent_generators());
  if (j.contains("integrator")) {
    const json& in = j.at("integrator");
    c.integrator.dt = detail::optional_value<double>(in, "dt", c.integrator.dt, "integrator");
    c.integrator.T = detail::optional_value<double>(in, "T", c.integrator.T, "integrator");
    c.integrator.spd_floor = detail::optional_value<double>(in, "spd_floor", c.integrator.spd_floor, "integrator");
    c.integrator.local_tol = detail::optional_value<double>(in, "local_tol", c.integrator.local_tol, "integrator");
    const auto scheme = detail::optional_value<std::string>(in, "scheme", "rk4", "integrator");
    if (scheme == "rk4")
      c.integrator.scheme = Scheme::rk4;
    else if (scheme == "rk4_adaptive")
      c.integrator.scheme = Scheme::rk4_adaptive;
    else
      throw SchemaError("integrator: unknown scheme \"" + scheme + "\"");
    if (!(c.integrator.dt > 0.0) || !(c.integrator.T >= 0.0))
      throw SchemaError("integrator: need dt > 0 and T >= 0");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (t.contains("gate")) c.gate_tol = detail::require<double>(t, "gate", "tolerances");
    c.op.solver_tol = detail::optional_value<double>(t, "solver", c.op.solver_tol, "tolerances");
  }
  if (j.contains("output")) c.out_dir = detail::optional_value<std::string>(j.at("output"), "dir", c.out_dir, "output");
  return c;
}

inline RunConfig read_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

/// Initial metric from its generator.
inline SymField make_metric(const FieldSpec& s, const Grid& grid) {
  if (s.generator == "flat") return s.scale * SymField::identity(grid);
  if (s.generator == "random") return random_smooth_fields(grid, *s.seed, s.amplitude, s.max_mode).metric.values();
  if (s.generator == "conformal") {
    // e^{2φ}δ with φ = amplitude · sin(m x) cos(m y)
    const double a = s.amplitude;
    const double m = s.max_mode;
    SymField g(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double x = grid.coordinate(p, 0);
      const double y = grid.dim > 1 ? grid.coordinate(p, 1) : 0.0;
      const double w = s.scale * std::exp(2.0 * a * std::sin(m * x) * std::cos(m * y));
      for (int i = 0; i < grid.dim; ++i) g(i, i, p) = w;
    }
    return g;
  }
  if (s.generator == "file") {
    SymField g = read_field(s.path);
    if (!(g.grid() == grid)) throw SchemaError("metric file " + s.path + " does not match the configured grid");
    return g;
  }
  throw SchemaError("unknown metric generator \"" + s.generator + "\"");
}

/// Tangent field from its generator; "metric" and "random_metric" scale g0.
inline SymField make_tangent(const FieldSpec& s, const SymField& g0) {
  const Grid& grid = g0.grid();
  if (s.generator == "zero") return SymField(grid);
  if (s.generator == "metric") return s.scale * g0;
  if (s.generator == "random") return s.scale * random_smooth_fields(grid, *s.seed, s.amplitude, s.max_mode).tangent;
  if (s.generator == "random_metric")
    return s.scale * random_smooth_fields(grid, *s.seed, s.amplitude, s.max_mode).metric.values();
  if (s.generator == "constant") {
    if (s.values.size() != static_cast<std::size_t>(SymField::count(grid.dim)))
      throw SchemaError("constant tangent needs " + std::to_string(SymField::count(grid.dim)) + " values");
    return s.scale * SymField::constant(grid, s.values);
  }
  if (s.generator == "file") {
    SymField h = read_field(s.path);
    if (!(h.grid() == grid)) throw SchemaError("tangent file " + s.path + " does not match the configured grid");
    return h;
  }
  throw SchemaError("unknown tangent generator \"" + s.generator + "\"");
}

// ---------------------------------------------------------------------------
// Reports

inline std::string monitor_line(const MonitorRecord& m) {
  return "{\"t\":" + format_double(m.t) + ",\"energy\":" + format_double(m.energy) +
         ",\"energy_drift\":" + format_double(m.energy_drift) + ",\"momentum_drift\":" + format_double(m.momentum_drift) +
         ",\"spd_margin\":" + format_double(m.spd_margin) + ",\"step_size\":" + format_double(m.step_size) +
         ",\"version\":\"" + version() + "\"}\n";
}

inline void write_monitors(const std::filesystem::path& path, const Trajectory& traj) {
  std::string s;
  for (const auto& m : traj.monitors) s += monitor_line(m);
  detail::write_text(path, s);
}

/// Writes the snapshots as field files plus a manifest listing them.
inline void write_snapshots(const std::filesystem::path& dir, const Trajectory& traj) {
  json manifest = {{"version", version()}, {"operator", operator_to_json(traj.spec)}, {"snapshots", json::array()}};
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "state_%05zu.json", i);
    write_field(dir / name, traj.states[i].g, "metric");
    manifest["snapshots"].push_back({{"t", traj.states[i].t}, {"metric", name}});
  }
  detail::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

inline void write_json(const std::filesystem::path& path, json j) {
  j["version"] = version();
  detail::write_text(path, j.dump(2) + "\n");
}

/// CSV with a version comment line, a header row and %.17g values.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  std::string s = "# " + version() + "\n";
  for (std::size_t c = 0; c < header.size(); ++c) s += (c ? "," : "") + header[c];
  s += "\n";
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + format_double(columns[c][r]);
    s += "\n";
  }
  detail::write_text(path, s);
}

}  // namespace gpmetric
