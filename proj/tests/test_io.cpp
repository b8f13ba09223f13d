#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "gpmetric/io.hpp"
#include "support.hpp"

using namespace gpmetric;
using namespace testing_support;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gpmetric_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

json minimal_config() {
  return json::parse(R"({
    "grid": {"dim": 2, "points": 8, "length": 1.0},
    "operator": {"family": "identity"},
    "initial_metric": {"generator": "random", "seed": 3, "amplitude": 0.2, "max_mode": 2},
    "initial_velocity": {"generator": "random", "seed": 4}
  })");
}

}  // namespace

TEST_CASE("field files round-trip bitwise") {
  const Grid grid = build_grid(2, {8, 12}, {1.0, 2.5});
  const auto rf = random_smooth_fields(grid, 901, 0.3, 1);
  const auto path = scratch("metric.json");
  write_field(path, rf.metric.values(), "metric");
  const SymField back = read_field(path);
  CHECK(back.grid() == grid);
  CHECK(back.data() == rf.metric.values().data());

  const Grid line = square_grid(1, 12, 3.0);
  const SymField h = random_smooth_fields(line, 902, 0.3, 2).tangent;
  write_field(scratch("line.json"), h);
  CHECK(read_field(scratch("line.json")).data() == h.data());

  const json j = read_json_file(path);
  CHECK(j.at("kind") == "metric");
  CHECK(j.at("version") == version());
  CHECK(j.at("components").contains("g_01"));

  // identical input gives identical bytes
  write_field(scratch("again.json"), rf.metric.values(), "metric");
  std::ifstream a(path), b(scratch("again.json"));
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("malformed field files are schema errors") {
  json j = read_json_file([] {
    const auto p = scratch("ok.json");
    write_field(p, SymField::identity(square_grid(2, 8, 1.0)), "metric");
    return p;
  }());
  json short_comp = j;
  short_comp["components"]["g_00"].erase(0);
  CHECK_THROWS_AS(field_from_json(short_comp), SchemaError);
  json bad_kind = j;
  bad_kind["kind"] = "vector";
  CHECK_THROWS_AS(field_from_json(bad_kind), SchemaError);
  json missing = j;
  missing.erase("shape");
  CHECK_THROWS_AS(field_from_json(missing), SchemaError);
  CHECK_THROWS_AS(read_field(scratch("does_not_exist.json")), SchemaError);
}

TEST_CASE("operator specs parse from the config schema") {
  const OperatorSpec sob = operator_from_json(json::parse(R"({"family":"sobolev","p":1})"));
  CHECK(sob.family == OperatorSpec::Family::sobolev);
  CHECK(sob.p == 1);
  const OperatorSpec conf = operator_from_json(json::parse(R"({"family":"conformal","phi":{"kind":"power","k":1.0}})"));
  CHECK(conf.family == OperatorSpec::Family::conformal);
  CHECK(conf.phi.kind == PhiFunction::Kind::power);
  CHECK(conf.phi.exponent == 1.0);
  const OperatorSpec curv =
      operator_from_json(json::parse(R"({"family":"curvature","phi":{"kind":"affine_exp","a":1.0,"b":0.1}})"));
  CHECK(curv.phi.kind == PhiFunction::Kind::affine_exp);
  CHECK(curv.phi.b == 0.1);
  CHECK(operator_from_json(json::parse(R"({"family":"identity"})")).family == OperatorSpec::Family::identity);

  // round trip through the writer
  for (const auto& P : {sob, conf, curv}) {
    const OperatorSpec back = operator_from_json(operator_to_json(P));
    CHECK(back.family == P.family);
    CHECK(operator_to_json(back) == operator_to_json(P));
  }

  CHECK_THROWS_AS(operator_from_json(json::parse(R"({"family":"hyperbolic"})")), SchemaError);
  CHECK_THROWS_AS(operator_from_json(json::parse(R"({"family":"sobolev"})")), SchemaError);
  CHECK_THROWS_AS(operator_from_json(json::parse(R"({"family":"sobolev","p":"one"})")), SchemaError);
  CHECK_THROWS_AS(operator_from_json(json::parse(R"({"family":"conformal","phi":{"kind":"cubic"}})")), SchemaError);
  CHECK_THROWS_AS(operator_from_json(json::parse(R"({"family":"curvature","phi":{"kind":"affine_exp","a":-1,"b":0}})")),
                  SchemaError);
}

TEST_CASE("run configs") {
  const RunConfig c = config_from_json(minimal_config());
  CHECK(c.points == 8);
  CHECK(c.metric.seed == 3u);
  CHECK(c.integrator.dt == 1e-3);
  CHECK_FALSE(c.gate_tol.has_value());

  const SymField g = make_metric(c.metric, c.grid());
  CHECK(g.data() == random_smooth_fields(c.grid(), 3, 0.2, 2).metric.values().data());
  // generators are deterministic
  CHECK(make_tangent(c.velocity, g).data() == make_tangent(c.velocity, g).data());

  json no_seed = minimal_config();
  no_seed["initial_metric"].erase("seed");
  CHECK_THROWS_AS(config_from_json(no_seed), SchemaError);

  json unknown_gen = minimal_config();
  unknown_gen["initial_velocity"]["generator"] = "gaussian";
  CHECK_THROWS_AS(config_from_json(unknown_gen), SchemaError);

  json unknown_key = minimal_config();
  unknown_key["env"] = "HOME";
  CHECK_THROWS_AS(config_from_json(unknown_key), SchemaError);

  json bad_grid = minimal_config();
  bad_grid["grid"]["dim"] = 3;
  CHECK_THROWS_AS(config_from_json(bad_grid), SchemaError);

  json bad_scheme = minimal_config();
  bad_scheme["integrator"] = {{"scheme", "euler"}};
  CHECK_THROWS_AS(config_from_json(bad_scheme), SchemaError);

  json tol = minimal_config();
  tol["tolerances"] = {{"gate", 1e-9}, {"solver", 1e-12}};
  const RunConfig t = config_from_json(tol);
  CHECK(t.gate_tol == 1e-9);
  CHECK(t.op.solver_tol == 1e-12);

  json constant = minimal_config();
  constant["initial_velocity"] = {{"generator", "constant"}, {"values", {0.1, 0.2}}};
  const RunConfig cc = config_from_json(constant);
  CHECK_THROWS_AS(make_tangent(cc.velocity, g), SchemaError);
}

TEST_CASE("monitor and csv writers") {
  const Grid grid = square_grid(2, 8, 1.0);
  IntegratorOptions opt;
  opt.dt = 0.1;
  opt.T = 0.3;
  const Trajectory traj = integrate_geodesic(OperatorSpec::identity(), SymField::identity(grid),
                                             SymField::identity(grid), opt);
  const auto path = scratch("monitors.jsonl");
  write_monitors(path, traj);
  std::ifstream in(path);
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    CHECK(j.at("version") == version());
    CHECK(j.contains("energy_drift"));
    ++count;
  }
  CHECK(count == traj.monitors.size());

  write_csv(scratch("curve.csv"), {"r", "psi"}, {{0.5, 1.0}, {0.25, 0.1}});
  std::ifstream csv(scratch("curve.csv"));
  std::getline(csv, line);
  CHECK(line == "# " + version());
  std::getline(csv, line);
  CHECK(line == "r,psi");
  std::getline(csv, line);
  CHECK(line == "0.5,0.25");
  std::getline(csv, line);
  CHECK(line == "1,0.10000000000000001");
}
