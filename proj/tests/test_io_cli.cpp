// test_io_cli.cpp -- formatting, strict config parsing, data materialization,
// field dumps, thread resolution, and end-to-end CLI runs (exit codes and
// byte-identical reports across thread counts).

#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "stokes2p/io.hpp"
#include "stokes2p/threads.hpp"
#include "test_util.hpp"

using namespace stokes2p;
using namespace stokes2p::testutil;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), {});
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  REQUIRE(f.good());
}

#ifdef STOKES2P_CLI_PATH
int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + (env.empty() ? "" : " ") + STOKES2P_CLI_PATH + " " + args +
      " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path("cli_tmp") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
#endif

}  // namespace

TEST_CASE("fmt_double: shortest round-trip formatting") {
  CHECK(fmt_double(0.1) == "0.1");
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(-2.5) == "-2.5");
  CHECK(fmt_double(0.0) == "0");
  CHECK(fmt_complex(cd(1.5, -2.0)) == "1.5:-2");
  Rng rng(501);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform_signed() * std::pow(10.0, rng.uniform(-30.0, 30.0));
    const std::string s = fmt_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("fnv1a_hex matches the reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("Csv: layout and row-width guard") {
  Csv csv({"a", "b"});
  csv.comment("config_hash", "deadbeef");
  csv.row({"1", "x"});
  csv.row({"2.5", "y"});
  CHECK(csv.str() == "# config_hash=deadbeef\na,b\n1,x\n2.5,y\n");
  CHECK_THROWS_AS(csv.row({"only-one"}), std::invalid_argument);
}

TEST_CASE("config parsing is strict") {
  // defaults parse
  const CertifyConfig c0 = parse_certify_config("{}");
  CHECK(c0.sector.n == 3);
  CHECK(c0.seed == 1);

  CHECK_THROWS_AS(parse_certify_config("{\"bogus\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_certify_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_certify_config("{\"sector\": {\"eta\": 0.8}}"), ConfigError);
  CHECK_THROWS_AS(parse_certify_config("{\"fluid\": {\"mu_plus\": -1.0}}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_certify_config("{\"seed\": -4}"), ConfigError);

  // solve: lambda list/sweep exclusivity and surface guard
  CHECK_THROWS_AS(parse_solve_config(
                      "{\"lambda\": {\"list\": [[1,0]], \"sweep\": {}}}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_solve_config("{\"q\": 0}"), ConfigError);
  CHECK_THROWS_AS(parse_solve_config("{\"surface\": true}"), ConfigError);
  const SolveConfig s0 = parse_solve_config(
      "{\"lambda\": {\"sweep\": {\"args\": [0.0], \"points\": 3}}}");
  REQUIRE(s0.sweep.has_value());
  CHECK(s0.sweep->points == 3);

  // evolve: spec validation and the surface contour gate
  CHECK_THROWS_AS(parse_evolve_config("{\"time\": {\"N_t\": 7}}"), ConfigError);
  CHECK_THROWS_AS(parse_evolve_config("{\"contour\": {\"gamma\": 0.0}}"), ConfigError);
  CHECK_THROWS_AS(
      parse_evolve_config("{\"surface\": true, \"fluid\": {\"c_sigma\": 1.0}, "
                          "\"contour\": {\"gamma\": 0.5}}"),
      ConfigError);
  const EvolveConfig e0 = parse_evolve_config("{\"profile\": {\"kind\": \"step\"}}");
  CHECK(e0.profile == TimeProfile::step);
}

TEST_CASE("materialize_data: single modes, zero-mode guard, band determinism") {
  GridSpec g;
  g.n = 2;
  g.modes[0] = 8;
  InterfaceData data;
  InteriorForce force;

  DataSpec one;
  one.kind = DataSpec::Kind::single_mode;
  one.field = "h2";
  one.k[0] = -2;
  one.value = cd(0.5, -1.0);
  materialize_data(one, g, data, force);
  const std::size_t mode = 6;  // signed -2 on an 8-point axis
  CHECK(data.h[1][mode] == cd(0.5, -1.0));
  double other = 0.0;
  for (int j = 0; j < 2; ++j)
    for (std::size_t m = 0; m < g.mode_count(); ++m) {
      if (j == 1 && m == mode) continue;
      other += std::abs(data.h[j][m]) + std::abs(data.g[j][m]);
    }
  CHECK(other == 0.0);
  CHECK(force.zero());

  DataSpec zero_mode = one;
  zero_mode.k[0] = 0;
  CHECK_THROWS_AS(materialize_data(zero_mode, g, data, force), ConfigError);

  DataSpec fmode = one;
  fmode.field = "f1";
  fmode.k[0] = 0;
  fmode.kv = 2;
  materialize_data(fmode, g, data, force);
  CHECK_FALSE(force.zero());
  CHECK(force_at(g, force, 0, 0, 2) == cd(0.5, -1.0));

  DataSpec band;
  band.kind = DataSpec::Kind::random_band;
  band.band = 2;
  band.seed = 42;
  InterfaceData d1, d2;
  materialize_data(band, g, d1, force);
  materialize_data(band, g, d2, force);
  for (int j = 0; j < 2; ++j)
    for (std::size_t m = 0; m < g.mode_count(); ++m) {
      CHECK(d1.g[j][m] == d2.g[j][m]);
      CHECK(d1.h[j][m] == d2.h[j][m]);
    }
  CHECK(d1.g[0][0] == cd{});  // zero mode stays clear
  band.seed = 43;
  materialize_data(band, g, d2, force);
  bool differs = false;
  for (std::size_t m = 0; m < g.mode_count(); ++m)
    differs = differs || d1.g[0][m] != d2.g[0][m];
  CHECK(differs);
}

TEST_CASE("field dumps round-trip and match physical-space evaluation") {
  Rng rng(523);
  GridSpec g;
  g.n = 2;
  g.modes[0] = 8;
  g.n_vertical = 6;
  g.X = 5.0;
  InterfaceData data = make_interface_data(g);
  data.g[0][2] = cd(0.4, 0.2);
  data.h[1][3] = cd(-0.3, 0.9);
  const cd lambda(2.0, 0.5);
  const FluidParams fp = random_params(rng);
  const TwoPhaseField field = boundary_solve(g, data, lambda, fp);

  const fs::path path = fs::path("field_dump_test.bin");
  dump_field(path.string(), field);
  FieldDumpHeader hd;
  std::vector<cd> values;
  read_field_dump(path.string(), hd, values);
  fs::remove(path);

  CHECK(hd.n == 2);
  CHECK(hd.m1 == 8);
  CHECK(hd.n_vertical == 6);
  CHECK(hd.components == 3);
  CHECK(hd.lambda == lambda);
  const std::size_t per_side = static_cast<std::size_t>(g.n_vertical) *
                               g.mode_count() * static_cast<std::size_t>(hd.components);
  REQUIRE(values.size() == 2 * per_side);

  // recompute the (plus side, node 2, component 0) slice independently
  const std::vector<double> zs = g.vertical_nodes();
  std::vector<cd> modes(g.mode_count()), phys;
  for (std::size_t m = 0; m < g.mode_count(); ++m)
    modes[m] = field.eval_mode(m, Side::plus, zs[2]).u[0];
  tangential_ifft(g, modes, phys);
  for (std::size_t p = 0; p < g.mode_count(); ++p) {
    const std::size_t at =
        (static_cast<std::size_t>(2) * g.mode_count() + p) *
        static_cast<std::size_t>(hd.components);
    CHECK(std::abs(values[at] - phys[p]) < 1e-14);
  }
}

TEST_CASE("resolve_thread_count precedence: flag > env > config") {
  unsetenv("STOKES2P_THREADS");
  CHECK(resolve_thread_count(0, 0) == 1);
  CHECK(resolve_thread_count(0, 3) == 3);
  CHECK(resolve_thread_count(5, 3) == 5);
  setenv("STOKES2P_THREADS", "7", 1);
  CHECK(resolve_thread_count(0, 3) == 7);
  CHECK(resolve_thread_count(2, 3) == 2);
  setenv("STOKES2P_THREADS", "9999", 1);
  CHECK(resolve_thread_count(0, 0) == 256);  // clamped
  unsetenv("STOKES2P_THREADS");
}

#ifdef STOKES2P_CLI_PATH

TEST_CASE("cli: certify runs, reports pass, and is byte-identical across "
          "thread counts") {
  const fs::path dir = fresh_dir("certify");
  const std::string cfg = R"({
    "n": 2,
    "sector": {"n_radii": 3, "n_angles": 3, "n_xn": 2, "n_jitter": 8},
    "seed": 11
  })";
  spit(dir / "c.json", cfg);

  const fs::path out1 = dir / "t1", out4 = dir / "t4", oenv = dir / "tenv";
  REQUIRE(run_cli("certify --config " + (dir / "c.json").string() + " --out " +
                  out1.string() + " --threads 1") == 0);
  REQUIRE(run_cli("certify --config " + (dir / "c.json").string() + " --out " +
                  out4.string() + " --threads 4") == 0);
  REQUIRE(run_cli("certify --config " + (dir / "c.json").string() + " --out " +
                  oenv.string(),
                  "STOKES2P_THREADS=8") == 0);

  const std::string r1 = slurp(out1 / "certify_report.csv");
  CHECK(r1 == slurp(out4 / "certify_report.csv"));
  CHECK(r1 == slurp(oenv / "certify_report.csv"));
  CHECK(r1.find("negative_control") != std::string::npos);
  CHECK(r1.find("# config_hash=") == 0);
}

TEST_CASE("cli: sweep reports are byte-identical across thread counts") {
  const fs::path dir = fresh_dir("sweep");
  const std::string cfg = R"({
    "grid": {"n": 2, "modes": [8], "n_vertical": 12, "X": 6.0},
    "lambda": {"sweep": {"args": [0.0, 1.1], "radius_range": [0.5, 50.0], "points": 4}},
    "data": {"kind": "random_band", "band": 2},
    "seed": 5
  })";
  spit(dir / "c.json", cfg);
  const fs::path out1 = dir / "t1", out4 = dir / "t4";
  REQUIRE(run_cli("sweep --config " + (dir / "c.json").string() + " --out " +
                  out1.string() + " --threads 1") == 0);
  REQUIRE(run_cli("sweep --config " + (dir / "c.json").string() + " --out " +
                  out4.string() + " --threads 4") == 0);
  CHECK(slurp(out1 / "sweep_report.csv") == slurp(out4 / "sweep_report.csv"));
}

TEST_CASE("cli: solve runs clean on single-mode data and respects --seed in "
          "the config hash") {
  const fs::path dir = fresh_dir("solve");
  const std::string cfg = R"({
    "grid": {"n": 2, "modes": [8], "n_vertical": 12, "X": 6.0},
    "lambda": {"list": [[2.0, 1.0], [3.0, 0.0]]},
    "data": {"kind": "single_mode", "field": "h2", "k": [1], "value": [1.0, 0.0]}
  })";
  spit(dir / "c.json", cfg);
  const fs::path o1 = dir / "a", o2 = dir / "b";
  REQUIRE(run_cli("solve --config " + (dir / "c.json").string() + " --out " +
                  o1.string()) == 0);
  REQUIRE(run_cli("solve --config " + (dir / "c.json").string() + " --out " +
                  o2.string() + " --seed 99") == 0);
  const std::string a = slurp(o1 / "solve_report.csv");
  const std::string b = slurp(o2 / "solve_report.csv");
  CHECK(a.substr(0, a.find('\n')) != b.substr(0, b.find('\n')));  // hash moved
}

TEST_CASE("cli: exit codes for config errors, check failures and bad usage") {
  const fs::path dir = fresh_dir("codes");
  spit(dir / "bad.json", "{\"bogus\": true}");
  CHECK(run_cli("solve --config " + (dir / "bad.json").string() + " --out " +
                dir.string()) == 2);
  CHECK(run_cli("solve --config " + (dir / "missing.json").string() + " --out " +
                dir.string()) == 2);
  CHECK(run_cli("") == 2);  // missing subcommand

  // step_exp growth at/above the contour abscissa is a failed run, not a
  // config error: the transform itself is divergent there
  const std::string pole = R"({
    "grid": {"n": 2, "modes": [4], "n_vertical": 8, "X": 5.0},
    "contour": {"gamma": 1.25, "nodes": 16, "tau_max": 50.0},
    "time": {"T": 2.0, "N_t": 16},
    "profile": {"kind": "step_exp", "param": 2.0},
    "data": {"kind": "single_mode", "field": "h2", "k": [1], "value": [1.0, 0.0]}
  })";
  spit(dir / "pole.json", pole);
  CHECK(run_cli("evolve --config " + (dir / "pole.json").string() + " --out " +
                dir.string()) == 1);

  // roundtrip probe must sit right of the contour
  const std::string probe = R"({
    "grid": {"n": 2, "modes": [4], "n_vertical": 8, "X": 5.0},
    "contour": {"gamma": 1.25, "nodes": 16, "tau_max": 50.0},
    "time": {"T": 2.0, "N_t": 16},
    "roundtrip_lambda": 1.0,
    "data": {"kind": "single_mode", "field": "h2", "k": [1], "value": [1.0, 0.0]}
  })";
  spit(dir / "probe.json", probe);
  CHECK(run_cli("evolve --config " + (dir / "probe.json").string() + " --out " +
                dir.string()) == 2);
}

TEST_CASE("cli: evolve emits the trajectory report with gate comments") {
  const fs::path dir = fresh_dir("evolve");
  const std::string cfg = R"({
    "grid": {"n": 2, "modes": [8], "n_vertical": 12, "X": 6.0},
    "contour": {"gamma": 1.25, "nodes": 512, "tau_max": 2000.0},
    "time": {"T": 8.0, "N_t": 256},
    "data": {"kind": "single_mode", "field": "h2", "k": [1], "value": [1.0, 0.0]}
  })";
  spit(dir / "c.json", cfg);
  REQUIRE(run_cli("evolve --config " + (dir / "c.json").string() + " --out " +
                  dir.string()) == 0);
  const std::string rep = slurp(dir / "evolve_report.csv");
  CHECK(rep.find("# roundtrip_error=") != std::string::npos);
  CHECK(rep.find("# causality_error=") != std::string::npos);
  CHECK(rep.find("# maxreg_ratio=") != std::string::npos);
}

#endif  // STOKES2P_CLI_PATH
