// gpmetric command-line front end.
//
// Exit status: 0 when every gated tolerance passes (a geodesic that reaches
// the boundary of the metric cone is reported, not failed), 1 on a gate or
// numerical failure, 2 on malformed arguments or configuration.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "gpmetric/gpmetric.hpp"

namespace fs = std::filesystem;
using namespace gpmetric;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_gate = 1;
constexpr int exit_schema = 2;

struct Common {
  std::string config;
  std::string out;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "JSON run configuration");
  if (config_required) opt->required();
  app->add_option("--out", c.out, "output directory");
  app->add_option("--grid", c.grid, "grid points per axis (overrides the config)");
  app->add_option("--seed", c.seed, "seed for every random generator (overrides the config)");
  app->add_option("--tol", c.tol, "gate tolerance (overrides the config)");
}

/// Loads the config and applies the command-line overrides. The seed goes
/// to the metric and velocity as given, to `second` as seed+1 and to
/// `target` as seed+2 so the fields stay independent.
RunConfig load(const Common& c) {
  RunConfig cfg = read_config(c.config);
  if (c.grid) {
    if (*c.grid < 4) throw SchemaError("--grid must be at least 4");
    cfg.points = *c.grid;
  }
  if (c.seed) {
    cfg.metric.seed = *c.seed;
    cfg.velocity.seed = *c.seed;
    cfg.second.seed = *c.seed + 1;
    cfg.target.seed = *c.seed + 2;
  }
  if (c.tol) cfg.gate_tol = *c.tol;
  return cfg;
}

fs::path out_dir(const Common& c, const RunConfig* cfg) {
  if (!c.out.empty()) return c.out;
  return cfg ? fs::path(cfg->out_dir) : fs::path("out");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

int gate(bool ok, const std::string& what) {
  std::cout << (ok ? "gate passed: " : "gate FAILED: ") << what << "\n";
  return ok ? exit_ok : exit_gate;
}

// ---------------------------------------------------------------------------

int run_geodesic(const Common& c) {
  const RunConfig cfg = load(c);
  const fs::path dir = out_dir(c, &cfg);
  const Grid grid = cfg.grid();
  const SymField g0 = make_metric(cfg.metric, grid);
  const SymField u0 = make_tangent(cfg.velocity, g0);
  const Trajectory traj = integrate_geodesic(cfg.op, g0, u0, cfg.integrator);

  write_monitors(dir / "monitors.jsonl", traj);
  write_snapshots(dir / "snapshots", traj);
  write_field(dir / "final_metric.json", traj.final_state().g, "metric");
  const double ed = max_energy_drift(traj), md = max_momentum_drift(traj);
  const double length = traj.monitors.size() >= 2 ? path_length(traj) : 0.0;
  double change = 0.0;
  for (const auto& st : traj.states)
    for (std::size_t i = 0; i < g0.data().size(); ++i) change = std::max(change, std::abs(st.g.data()[i] - g0.data()[i]));
  write_json(dir / "summary.json", {{"operator", operator_to_json(cfg.op)},
                                    {"t_final", traj.final_state().t},
                                    {"steps", traj.monitors.size() - 1},
                                    {"boundary_reached", traj.boundary_reached},
                                    {"halt_reason", traj.halt_reason},
                                    {"max_energy_drift", ed},
                                    {"max_momentum_drift", md},
                                    {"path_length", length},
                                    {"max_state_change", change}});
  std::cout << "t_final " << fmt(traj.final_state().t) << "\nmax_energy_drift " << fmt(ed) << "\nmax_momentum_drift "
            << fmt(md) << "\npath_length " << fmt(length) << "\nmax_state_change " << fmt(change) << "\n";
  if (traj.boundary_reached) std::cout << "boundary_reached true (" << traj.halt_reason << ")\n";
  if (!cfg.gate_tol) return exit_ok;
  return gate(ed <= *cfg.gate_tol, "max energy drift " + fmt(ed) + " <= " + fmt(*cfg.gate_tol));
}

struct FieldInputs {
  std::string g0, g1, u;
};

int run_expmap(const Common& c, const FieldInputs& f) {
  const RunConfig cfg = load(c);
  const fs::path dir = out_dir(c, &cfg);
  const SymField g0 = f.g0.empty() ? make_metric(cfg.metric, cfg.grid()) : read_field(f.g0);
  const SymField u = f.u.empty() ? make_tangent(cfg.velocity, g0) : read_field(f.u);
  if (!(u.grid() == g0.grid())) throw SchemaError("expmap: g0 and u live on different grids");
  ExpOptions eo;
  eo.dt = cfg.integrator.dt;
  eo.scheme = cfg.integrator.scheme;
  eo.spd_floor = cfg.integrator.spd_floor;
  const SymField g1 = exp_map(cfg.op, g0, u, eo);
  write_field(dir / "exp_metric.json", g1, "metric");
  write_json(dir / "expmap.json", {{"operator", operator_to_json(cfg.op)}, {"dt", eo.dt}, {"output", "exp_metric.json"}});
  std::cout << "wrote " << (dir / "exp_metric.json").string() << "\n";
  return exit_ok;
}

int run_logmap(const Common& c, const FieldInputs& f) {
  const RunConfig cfg = load(c);
  const fs::path dir = out_dir(c, &cfg);
  const SymField g0 = f.g0.empty() ? make_metric(cfg.metric, cfg.grid()) : read_field(f.g0);
  SymField g1;
  if (!f.g1.empty())
    g1 = read_field(f.g1);
  else if (cfg.target.generator != "none")
    g1 = make_metric(cfg.target, g0.grid());
  else
    throw SchemaError("logmap: needs a target metric (--g1 or \"target\" in the config)");
  LogOptions lo;
  lo.exp.dt = cfg.integrator.dt;
  lo.exp.scheme = cfg.integrator.scheme;
  lo.exp.spd_floor = cfg.integrator.spd_floor;
  if (cfg.gate_tol) lo.rel_tol = *cfg.gate_tol;
  const LogResult r = log_map_report(cfg.op, g0, g1, lo);
  write_field(dir / "log_velocity.json", r.u, "sym2");
  write_json(dir / "logmap.json", {{"operator", operator_to_json(cfg.op)},
                                   {"iterations", r.iterations},
                                   {"final_residual", r.final_residual},
                                   {"converged", r.converged},
                                   {"message", r.message}});
  std::cout << "iterations " << r.iterations << "\nfinal_residual " << fmt(r.final_residual) << "\n";
  return gate(r.converged, r.converged ? "shooting converged" : r.message);
}

struct ScalingArgs {
  std::string family = "identity";
  int n = 2;
  double vol = 1.0;
  double k = 1.0;
  int p = 1;
  double a = 1.0, b = 0.1;
  double r_min = 1e-4, r_max = 4.0;
  int samples = 33;
};

OperatorSpec scaling_operator(const ScalingArgs& s) {
  if (s.family == "identity") return OperatorSpec::identity();
  if (s.family == "conformal") return OperatorSpec::conformal(PhiFunction::power(s.k));
  if (s.family == "sobolev") return OperatorSpec::sobolev(s.p);
  if (s.family == "curvature") return OperatorSpec::curvature(PhiFunction::affine_exp(s.a, s.b));
  throw SchemaError("unknown family \"" + s.family + "\"");
}

int run_scaling(const Common& c, const ScalingArgs& s) {
  std::optional<RunConfig> cfg;
  if (!c.config.empty()) cfg = load(c);
  const fs::path dir = out_dir(c, cfg ? &*cfg : nullptr);
  const OperatorSpec P = cfg ? cfg->op : scaling_operator(s);
  const auto rs = geometric_samples(s.r_min, s.r_max, s.samples);

  LengthResult len;
  std::optional<ScalingProfile> prof;
  if (cfg) {
    // profile of the configured metric
    const SymField g0 = make_metric(cfg->metric, cfg->grid());
    if (P.family == OperatorSpec::Family::curvature)
      len = curvature_scaling_length(P, g0);
    else {
      prof = extract_psi_f(P, g0, rs);
      len = scaling_length(*prof);
    }
  } else {
    if (s.n < 1) throw SchemaError("--n must be positive");
    if (!(s.vol > 0.0)) throw SchemaError("--vol must be positive");
    if (P.family == OperatorSpec::Family::curvature) {
      // flat torus of the requested volume: Scal ≡ 0, so Φ(Scal/r) = Φ(0)
      if (s.n > 2) throw SchemaError("scaling: the curvature family needs --n 1 or 2");
      const double side = std::pow(s.vol, 1.0 / s.n);
      len = curvature_scaling_length(P, SymField::identity(square_grid(s.n, 8, side)));
    } else {
      prof = analytic_profile(P, s.n, s.vol);
      len = scaling_length(*prof);
    }
  }
  if (prof) {
    std::vector<double> psi, f;
    for (double r : rs) {
      psi.push_back(prof->psi_at(r));
      f.push_back(prof->f_at(r));
    }
    write_csv(dir / "profile.csv", {"r", "psi", "f"}, {rs, psi, f});
  }
  json summary = {{"finite", len.finite}, {"criterion", len.criterion}, {"operator", operator_to_json(P)}};
  summary["length"] = len.finite ? json(len.length) : json("inf");
  write_json(dir / "summary.json", summary);
  std::cout << "length " << (len.finite ? fmt(len.length) : std::string("inf")) << "\nfinite "
            << (len.finite ? "true" : "false") << "\ncriterion " << len.criterion << "\n";
  return exit_ok;
}

int run_ricci_curl(const Common& c) {
  const RunConfig cfg = load(c);
  const fs::path dir = out_dir(c, &cfg);
  const SymField g = make_metric(cfg.metric, cfg.grid());
  const SymField h = make_tangent(cfg.velocity, g);
  if (cfg.second.generator == "none") throw SchemaError("ricci-curl: needs a second direction (\"second\")");
  const SymField k = make_tangent(cfg.second, g);
  const CurlResult cr = curl_residual(cfg.op, g, h, k);
  const double residual = gradient_condition_residual(cfg.op, g, h);
  const double diff = std::abs(cr.lhs - cr.rhs);
  const json out = {{"lhs", cr.lhs}, {"rhs", cr.rhs}, {"abs_diff", diff}, {"residual_norm", residual}};
  write_json(dir / "ricci_curl.json", out);
  std::cout << out.dump(2) << "\n";
  const double tol = cfg.gate_tol.value_or(1e-2);
  const double relative = diff / std::max(std::abs(cr.lhs), 1e-300);
  return gate(relative <= tol || diff == 0.0, "relative curl mismatch " + fmt(relative) + " <= " + fmt(tol));
}

int run_curvature(const Common& c) {
  const RunConfig cfg = load(c);
  const fs::path dir = out_dir(c, &cfg);
  const Geometry geom(make_metric(cfg.metric, cfg.grid()));
  const Curvature curv = curvature(geom);
  write_field(dir / "scal.json", curv.scal);
  write_field(dir / "ricci.json", curv.ricci, "sym2");
  const double gb = integrate_with_density(geom, curv.scal);
  double smax = 0.0;
  for (double v : curv.scal.values) smax = std::max(smax, std::abs(v));
  write_json(dir / "curvature.json", {{"integral_scal_vol", gb}, {"max_abs_scal", smax}, {"volume", total_volume(geom)}});
  std::cout << "integral_scal_vol " << fmt(gb) << "\nmax_abs_scal " << fmt(smax) << "\n";
  const double tol = cfg.gate_tol.value_or(1e-6);
  return gate(std::abs(gb) <= tol, "|integral Scal vol| " + fmt(std::abs(gb)) + " <= " + fmt(tol));
}

std::string gate_symbol(Gate g) {
  switch (g) {
    case Gate::at_most:
      return "<=";
    case Gate::at_least:
      return ">=";
    case Gate::above:
      return ">";
  }
  return "?";
}

int run_verify(const Common& c, const std::string& suite, int fine_grid, int seeds) {
  SuiteOptions opt;
  if (c.grid) opt.grid = *c.grid;
  if (c.seed) opt.seed = *c.seed;
  opt.conservation_fine_grid = fine_grid;
  opt.round_trip_seeds = seeds;
  if (opt.grid < 8) throw SchemaError("--grid must be at least 8 for the verification suites");
  const auto& examples = example_suite_names();
  const bool is_example = std::find(examples.begin(), examples.end(), suite) != examples.end();
  if (!is_example && suite != "all" &&
      std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw SchemaError("unknown suite \"" + suite + "\"");

  // example suites fix their own grids and seeds
  const auto reports = is_example ? std::vector<SuiteReport>{run_examples(suite)} : run_suites(suite, opt);
  json out = {{"grid", opt.grid}, {"seed", opt.seed}, {"suites", json::array()}};
  bool all = true;
  std::printf("%-72s %12s %2s %9s  %s\n", "check", "value", "", "tolerance", "result");
  for (const auto& r : reports) {
    std::printf("[%s] %.1f s\n", r.suite.c_str(), r.seconds);
    json js = {{"suite", r.suite}, {"seconds", r.seconds}, {"pass", r.pass()}, {"checks", json::array()}};
    for (const auto& ch : r.checks) {
      std::printf("  %-70s %12.4e %2s %9.2e  %s%s%s\n", ch.name.c_str(), ch.value, gate_symbol(ch.gate).c_str(),
                  ch.tolerance, ch.pass ? "pass" : "FAIL", ch.note.empty() ? "" : "  ", ch.note.c_str());
      js["checks"].push_back({{"name", ch.name},
                              {"value", std::isfinite(ch.value) ? json(ch.value) : json(std::to_string(ch.value))},
                              {"gate", gate_symbol(ch.gate)},
                              {"tolerance", ch.tolerance},
                              {"pass", ch.pass},
                              {"note", ch.note}});
    }
    out["suites"].push_back(js);
    all = all && r.pass();
  }
  if (!c.out.empty()) write_json(fs::path(c.out) / "verify.json", out);
  std::printf("%s\n", all ? "all checks passed" : "some checks FAILED");
  return all ? exit_ok : exit_gate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"G^P metrics on the manifold of metrics over a flat torus"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Common geo, em, lm, sc, rc, cv, vf;
  FieldInputs emf, lmf;
  ScalingArgs sa;
  std::string suite = "all";
  int fine_grid = 512, seeds = 10;

  auto* geodesic = app.add_subcommand("geodesic", "integrate a geodesic and write monitors and snapshots");
  add_common(geodesic, geo, true);

  auto* expmap = app.add_subcommand("expmap", "exp_{g0}(u)");
  add_common(expmap, em, true);
  expmap->add_option("--g0", emf.g0, "base metric field file (overrides the config)");
  expmap->add_option("--u", emf.u, "velocity field file (overrides the config)");

  auto* logmap = app.add_subcommand("logmap", "log_{g0}(g1) by shooting");
  add_common(logmap, lm, true);
  logmap->add_option("--g0", lmf.g0, "base metric field file (overrides the config)");
  logmap->add_option("--g1", lmf.g1, "target metric field file (overrides the config)");

  auto* scaling = app.add_subcommand("scaling", "scaling profile and shrinking length");
  add_common(scaling, sc, false);
  scaling->add_option("--family", sa.family, "identity | conformal | sobolev | curvature")
      ->check(CLI::IsMember({"identity", "conformal", "sobolev", "curvature"}));
  scaling->add_option("--n", sa.n, "dimension");
  scaling->add_option("--vol", sa.vol, "volume of g0");
  scaling->add_option("--k", sa.k, "conformal power exponent");
  scaling->add_option("--p", sa.p, "sobolev order");
  scaling->add_option("--a", sa.a, "curvature weight a + b e^u: a");
  scaling->add_option("--b", sa.b, "curvature weight a + b e^u: b");
  scaling->add_option("--r-min", sa.r_min, "smallest profile radius");
  scaling->add_option("--r-max", sa.r_max, "largest profile radius");
  scaling->add_option("--samples", sa.samples, "profile samples");

  auto* ricci = app.add_subcommand("ricci-curl", "curl identity and gradient-condition residual");
  add_common(ricci, rc, true);

  auto* curv = app.add_subcommand("curvature", "curvature of the configured metric");
  add_common(curv, cv, true);

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, vf, false);
  verify->add_option("--suite", suite, "variational | adjoint | conservation | scaling | expmap | curvature | ricci | "
                                       "decoupling | all, or examples-grid | examples-tensor | examples-operators | "
                                       "examples-geodesic | examples-explog | examples-scaling | examples-ricci");
  verify->add_option("--fine-grid", fine_grid, "grid for the momentum tier of the pointwise families");
  verify->add_option("--seeds", seeds, "number of exp/log round-trip velocities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_schema;
  }

  try {
    if (*geodesic) return run_geodesic(geo);
    if (*expmap) return run_expmap(em, emf);
    if (*logmap) return run_logmap(lm, lmf);
    if (*scaling) return run_scaling(sc, sa);
    if (*ricci) return run_ricci_curl(rc);
    if (*curv) return run_curvature(cv);
    if (*verify) return run_verify(vf, suite, fine_grid, seeds);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_schema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_gate;
  }
  return exit_schema;
}
