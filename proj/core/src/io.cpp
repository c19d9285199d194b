// io.cpp -- CSV/report emission, field dumps, strict config parsing.

#include "stokes2p/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stokes2p/rng.hpp"

namespace stokes2p {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting / hashing
// ---------------------------------------------------------------------------

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_complex(cd v) { return fmt_double(v.real()) + ":" + fmt_double(v.imag()); }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

void Csv::comment(const std::string& key, const std::string& value) {
  comments_.emplace_back(key, value);
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("Csv: cell count does not match columns");
  rows_.push_back(cells);
}

std::string Csv::str() const {
  std::string out;
  for (const auto& [k, v] : comments_) out += "# " + k + "=" + v + "\n";
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out += ",";
    out += columns_[c];
  }
  out += "\n";
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += ",";
      out += r[c];
    }
    out += "\n";
  }
  return out;
}

void Csv::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::string s = str();
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

Csv bound_report_csv(const std::vector<BoundReport>& reports,
                     const std::string& config_hash) {
  Csv csv({"bound_id", "n", "sample_count", "worst_ratio", "lambda_re", "lambda_im",
           "xi", "x_n", "pass"});
  csv.comment("config_hash", config_hash);
  for (const BoundReport& r : reports) {
    std::string xi;
    for (int d = 0; d < r.n - 1; ++d) {
      if (d) xi += ";";
      xi += fmt_complex(r.arg_worst.xi[static_cast<std::size_t>(d)]);
    }
    if (r.worst_xi_n != cd{}) xi += ";" + fmt_complex(r.worst_xi_n);
    csv.row({r.bound_id, std::to_string(r.n), std::to_string(r.samples),
             fmt_double(r.worst_ratio), fmt_double(r.arg_worst.lambda.real()),
             fmt_double(r.arg_worst.lambda.imag()), xi, fmt_double(r.worst_x_n),
             r.pass ? "1" : "0"});
  }
  return csv;
}

// ---------------------------------------------------------------------------
// Binary field dumps
// ---------------------------------------------------------------------------

namespace {

void put_le_double(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b)
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

double get_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

}  // namespace

void dump_field(const std::string& path, const TwoPhaseField& field) {
  const GridSpec& g = field.grid;
  const std::vector<double> zs = g.vertical_nodes();
  const std::size_t P = g.mode_count();
  const int comps = g.n + 1;

  json h;
  h["magic"] = "stokes2p-field";
  h["n"] = g.n;
  h["m1"] = g.m1();
  h["m2"] = g.m2();
  h["n_vertical"] = static_cast<int>(zs.size());
  h["components"] = comps;
  h["X"] = g.X;
  h["L"] = {g.L[0], g.L[1]};
  h["lambda"] = {field.lambda.real(), field.lambda.imag()};

  std::string out = h.dump();
  out += "\n";

  std::vector<cd> modes(P), phys;
  std::vector<std::vector<cd>> phys_c(static_cast<std::size_t>(comps));
  for (Side side : {Side::plus, Side::minus}) {
    for (const double z : zs) {
      const double x = side == Side::plus ? z : -z;
      for (int c = 0; c < comps; ++c) {
        for (std::size_t m = 0; m < P; ++m) {
          const ModeEval e = field.eval_mode(m, side, x);
          modes[m] = c < g.n ? e.u[static_cast<std::size_t>(c)] : e.theta;
        }
        tangential_ifft(g, modes, phys_c[static_cast<std::size_t>(c)]);
      }
      for (std::size_t p = 0; p < P; ++p)
        for (int c = 0; c < comps; ++c) {
          const cd v = phys_c[static_cast<std::size_t>(c)][p];
          put_le_double(out, v.real());
          put_le_double(out, v.imag());
        }
    }
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

void read_field_dump(const std::string& path, FieldDumpHeader& header,
                     std::vector<cd>& values) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  const std::size_t nl = text.find('\n');
  if (nl == std::string::npos) throw std::runtime_error("field dump: missing header");
  json h;
  try {
    h = json::parse(text.substr(0, nl));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("field dump: bad header: ") + e.what());
  }
  if (h.value("magic", "") != std::string("stokes2p-field"))
    throw std::runtime_error("field dump: wrong magic");
  header.n = h.at("n").get<int>();
  header.m1 = h.at("m1").get<int>();
  header.m2 = h.at("m2").get<int>();
  header.n_vertical = h.at("n_vertical").get<int>();
  header.components = h.at("components").get<int>();
  header.X = h.at("X").get<double>();
  header.L[0] = h.at("L")[0].get<double>();
  header.L[1] = h.at("L")[1].get<double>();
  header.lambda = cd(h.at("lambda")[0].get<double>(), h.at("lambda")[1].get<double>());

  const std::size_t count = 2ULL * static_cast<std::size_t>(header.m1) * header.m2 *
                            header.n_vertical * header.components;
  const std::size_t bytes = count * 16;
  if (text.size() - nl - 1 != bytes)
    throw std::runtime_error("field dump: payload size mismatch");
  values.resize(count);
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(text.data()) + nl + 1;
  for (std::size_t i = 0; i < count; ++i, p += 16)
    values[i] = cd(get_le_double(p), get_le_double(p + 8));
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(std::string(where) + ": expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok) fail(std::string(where) + ": unknown key '" + item.key() + "'");
  }
}

double num(const json& j, const char* where) {
  if (!j.is_number()) fail(std::string(where) + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const char* where) {
  if (!j.is_number_integer()) fail(std::string(where) + ": expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const char* where) {
  if (!j.is_boolean()) fail(std::string(where) + ": expected a boolean");
  return j.get<bool>();
}

void pair_of(const json& j, const char* where, double out[2]) {
  if (!j.is_array() || j.size() != 2) fail(std::string(where) + ": expected [a, b]");
  out[0] = num(j[0], where);
  out[1] = num(j[1], where);
}

FluidParams parse_fluid(const json& j) {
  check_keys(j, "fluid",
             {"rho_plus", "rho_minus", "mu_plus", "mu_minus", "c_sigma", "c_g"});
  FluidParams fp;
  if (j.contains("rho_plus")) fp.rho_plus = num(j["rho_plus"], "fluid.rho_plus");
  if (j.contains("rho_minus")) fp.rho_minus = num(j["rho_minus"], "fluid.rho_minus");
  if (j.contains("mu_plus")) fp.mu_plus = num(j["mu_plus"], "fluid.mu_plus");
  if (j.contains("mu_minus")) fp.mu_minus = num(j["mu_minus"], "fluid.mu_minus");
  if (j.contains("c_sigma")) fp.c_sigma = num(j["c_sigma"], "fluid.c_sigma");
  if (j.contains("c_g")) fp.c_g = num(j["c_g"], "fluid.c_g");
  try {
    fp.validate();
  } catch (const std::exception& e) {
    fail(std::string("fluid: ") + e.what());
  }
  return fp;
}

GridSpec parse_grid(const json& j) {
  check_keys(j, "grid",
             {"n", "modes", "L", "n_vertical", "X", "zmin_factor", "uniform_vertical",
              "n_vert_modes"});
  GridSpec g;
  if (j.contains("n")) g.n = integer(j["n"], "grid.n");
  if (j.contains("modes")) {
    const json& m = j["modes"];
    if (!m.is_array() || m.empty() || m.size() > 2)
      fail("grid.modes: expected an array of 1 or 2 counts");
    g.modes[0] = integer(m[0], "grid.modes");
    g.modes[1] = m.size() > 1 ? integer(m[1], "grid.modes") : g.modes[0];
  }
  if (j.contains("L")) {
    const json& m = j["L"];
    if (!m.is_array() || m.empty() || m.size() > 2)
      fail("grid.L: expected an array of 1 or 2 periods");
    g.L[0] = num(m[0], "grid.L");
    g.L[1] = m.size() > 1 ? num(m[1], "grid.L") : g.L[0];
  }
  if (j.contains("n_vertical")) g.n_vertical = integer(j["n_vertical"], "grid.n_vertical");
  if (j.contains("X")) g.X = num(j["X"], "grid.X");
  if (j.contains("zmin_factor")) g.zmin_factor = num(j["zmin_factor"], "grid.zmin_factor");
  if (j.contains("uniform_vertical"))
    g.uniform_vertical = boolean(j["uniform_vertical"], "grid.uniform_vertical");
  if (j.contains("n_vert_modes"))
    g.n_vert_modes = integer(j["n_vert_modes"], "grid.n_vert_modes");
  try {
    g.validate();
  } catch (const std::exception& e) {
    fail(std::string("grid: ") + e.what());
  }
  return g;
}

SectorSampling parse_sector(const json& j, int dim) {
  check_keys(j, "sector",
             {"epsilon", "eta", "gamma0", "margin", "n_radii", "n_angles", "n_xn",
              "n_jitter", "radius_range", "xi_radius_range", "xn_range"});
  SectorSampling s;
  s.n = dim;
  if (j.contains("epsilon")) s.epsilon = num(j["epsilon"], "sector.epsilon");
  if (j.contains("eta")) s.eta = num(j["eta"], "sector.eta");
  if (j.contains("gamma0")) s.gamma0 = num(j["gamma0"], "sector.gamma0");
  if (j.contains("margin")) s.margin = num(j["margin"], "sector.margin");
  if (j.contains("n_radii")) s.n_radii = integer(j["n_radii"], "sector.n_radii");
  if (j.contains("n_angles")) s.n_angles = integer(j["n_angles"], "sector.n_angles");
  if (j.contains("n_xn")) s.n_xn = integer(j["n_xn"], "sector.n_xn");
  if (j.contains("n_jitter")) s.n_jitter = integer(j["n_jitter"], "sector.n_jitter");
  if (j.contains("radius_range")) pair_of(j["radius_range"], "sector.radius_range", s.radius_range);
  if (j.contains("xi_radius_range"))
    pair_of(j["xi_radius_range"], "sector.xi_radius_range", s.xi_radius_range);
  if (j.contains("xn_range")) pair_of(j["xn_range"], "sector.xn_range", s.xn_range);
  try {
    s.validate();
  } catch (const std::exception& e) {
    fail(std::string("sector: ") + e.what());
  }
  return s;
}

DataSpec parse_data(const json& j) {
  check_keys(j, "data", {"kind", "field", "k", "kv", "value", "band", "seed", "path"});
  DataSpec d;
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") {
    d.kind = DataSpec::Kind::zero;
  } else if (kind == "single_mode") {
    d.kind = DataSpec::Kind::single_mode;
  } else if (kind == "random_band") {
    d.kind = DataSpec::Kind::random_band;
  } else if (kind == "file") {
    d.kind = DataSpec::Kind::file;
  } else {
    fail("data.kind: expected zero | single_mode | random_band | file");
  }
  if (j.contains("field")) d.field = j["field"].get<std::string>();
  if (j.contains("k")) {
    const json& k = j["k"];
    if (!k.is_array() || k.empty() || k.size() > 2) fail("data.k: expected 1 or 2 indices");
    d.k[0] = integer(k[0], "data.k");
    d.k[1] = k.size() > 1 ? integer(k[1], "data.k") : 0;
  }
  if (j.contains("kv")) d.kv = integer(j["kv"], "data.kv");
  if (j.contains("value")) {
    const json& v = j["value"];
    if (!v.is_array() || v.size() != 2) fail("data.value: expected [re, im]");
    d.value = cd(num(v[0], "data.value"), num(v[1], "data.value"));
  }
  if (j.contains("band")) d.band = integer(j["band"], "data.band");
  if (j.contains("seed")) d.seed = static_cast<std::uint64_t>(integer(j["seed"], "data.seed"));
  if (j.contains("path")) d.path = j["path"].get<std::string>();
  if (d.kind == DataSpec::Kind::file && d.path.empty()) fail("data.path: required for kind=file");
  return d;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("config: ") + e.what());
  }
}

std::uint64_t parse_seed(const json& j) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    fail("seed: expected a non-negative integer");
  return j.get<std::uint64_t>();
}

}  // namespace

CertifyConfig parse_certify_config(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, "config", {"fluid", "sector", "limits", "n", "seed", "threads"});
  CertifyConfig c;
  if (j.contains("fluid")) c.fluid = parse_fluid(j["fluid"]);
  const int dim = j.contains("n") ? integer(j["n"], "n") : 3;
  if (dim != 2 && dim != 3) fail("n: must be 2 or 3");
  c.sector.n = dim;
  if (j.contains("sector")) c.sector = parse_sector(j["sector"], dim);
  if (j.contains("limits")) {
    check_keys(j["limits"], "limits", {"ratio_ceiling", "floor"});
    if (j["limits"].contains("ratio_ceiling"))
      c.limits.ratio_ceiling = num(j["limits"]["ratio_ceiling"], "limits.ratio_ceiling");
    if (j["limits"].contains("floor"))
      c.limits.floor = num(j["limits"]["floor"], "limits.floor");
  }
  if (j.contains("seed")) c.seed = parse_seed(j["seed"]);
  if (j.contains("threads")) c.threads = integer(j["threads"], "threads");
  try {
    c.sector.validate();
  } catch (const std::exception& e) {
    fail(std::string("sector: ") + e.what());
  }
  return c;
}

SolveConfig parse_solve_config(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, "config",
             {"fluid", "grid", "lambda", "data", "surface", "q", "tolerance",
              "dump_fields", "seed", "threads"});
  SolveConfig c;
  if (j.contains("fluid")) c.fluid = parse_fluid(j["fluid"]);
  if (j.contains("grid")) c.grid = parse_grid(j["grid"]);
  if (j.contains("lambda")) {
    const json& l = j["lambda"];
    check_keys(l, "lambda", {"list", "sweep"});
    if (l.contains("list") == l.contains("sweep"))
      fail("lambda: exactly one of 'list' or 'sweep' required");
    if (l.contains("list")) {
      for (const json& e : l["list"]) {
        if (!e.is_array() || e.size() != 2) fail("lambda.list: entries are [re, im]");
        c.lambdas.emplace_back(num(e[0], "lambda.list"), num(e[1], "lambda.list"));
      }
      if (c.lambdas.empty()) fail("lambda.list: must not be empty");
    } else {
      const json& s = l["sweep"];
      check_keys(s, "lambda.sweep", {"args", "radius_range", "points"});
      LambdaSweepSpec sw;
      if (s.contains("args")) {
        sw.args.clear();
        for (const json& a : s["args"]) sw.args.push_back(num(a, "lambda.sweep.args"));
      } else {
        sw.args = {0.0, 3.0 * pi / 8.0, -3.0 * pi / 8.0};
      }
      if (s.contains("radius_range")) {
        double rr[2];
        pair_of(s["radius_range"], "lambda.sweep.radius_range", rr);
        sw.radius_min = rr[0];
        sw.radius_max = rr[1];
      }
      if (s.contains("points")) sw.points = integer(s["points"], "lambda.sweep.points");
      if (!(sw.radius_min > 0.0) || !(sw.radius_max > sw.radius_min) || sw.points < 1)
        fail("lambda.sweep: need 0 < radius_min < radius_max and points >= 1");
      c.sweep = sw;
    }
  } else {
    c.lambdas = {cd(2.0, 1.0)};
  }
  if (j.contains("data")) c.data = parse_data(j["data"]);
  if (j.contains("surface")) c.with_surface = boolean(j["surface"], "surface");
  if (j.contains("q")) {
    c.q = integer(j["q"], "q");
    if (c.q < 1 || c.q > 8) fail("q: expected 1 <= q <= 8");
  }
  if (j.contains("tolerance")) c.tolerance = num(j["tolerance"], "tolerance");
  if (j.contains("dump_fields")) c.dump_fields = boolean(j["dump_fields"], "dump_fields");
  if (j.contains("seed")) c.seed = parse_seed(j["seed"]);
  if (j.contains("threads")) c.threads = integer(j["threads"], "threads");
  if (c.with_surface && !(c.fluid.c_sigma > 0.0))
    fail("surface: requires fluid.c_sigma > 0");
  return c;
}

EvolveConfig parse_evolve_config(const std::string& text) {
  const json j = parse_json(text);
  check_keys(j, "config",
             {"fluid", "grid", "contour", "time", "profile", "data", "surface",
              "roundtrip_lambda", "tolerance", "seed", "threads"});
  EvolveConfig c;
  if (j.contains("fluid")) c.fluid = parse_fluid(j["fluid"]);
  if (j.contains("grid")) c.grid = parse_grid(j["grid"]);
  if (j.contains("contour")) {
    check_keys(j["contour"], "contour", {"gamma", "nodes", "tau_max"});
    if (j["contour"].contains("gamma")) c.contour.gamma = num(j["contour"]["gamma"], "contour.gamma");
    if (j["contour"].contains("nodes")) c.contour.nodes = integer(j["contour"]["nodes"], "contour.nodes");
    if (j["contour"].contains("tau_max"))
      c.contour.tau_max = num(j["contour"]["tau_max"], "contour.tau_max");
  }
  if (j.contains("time")) {
    check_keys(j["time"], "time", {"T", "N_t"});
    if (j["time"].contains("T")) c.time.T = num(j["time"]["T"], "time.T");
    if (j["time"].contains("N_t")) c.time.n_t = integer(j["time"]["N_t"], "time.N_t");
  }
  if (j.contains("profile")) {
    check_keys(j["profile"], "profile", {"kind", "param"});
    const std::string kind = j["profile"].value("kind", "step_relax");
    if (kind == "step") {
      c.profile = TimeProfile::step;
    } else if (kind == "step_exp") {
      c.profile = TimeProfile::step_exp;
    } else if (kind == "step_relax") {
      c.profile = TimeProfile::step_relax;
    } else {
      fail("profile.kind: expected step | step_exp | step_relax");
    }
    if (j["profile"].contains("param"))
      c.profile_param = num(j["profile"]["param"], "profile.param");
  }
  if (j.contains("data")) c.data = parse_data(j["data"]);
  if (j.contains("surface")) c.with_surface = boolean(j["surface"], "surface");
  if (j.contains("roundtrip_lambda"))
    c.roundtrip_lambda = num(j["roundtrip_lambda"], "roundtrip_lambda");
  if (j.contains("tolerance")) c.tolerance = num(j["tolerance"], "tolerance");
  if (j.contains("seed")) c.seed = parse_seed(j["seed"]);
  if (j.contains("threads")) c.threads = integer(j["threads"], "threads");
  try {
    c.contour.validate();
    c.time.validate();
  } catch (const std::exception& e) {
    fail(std::string("evolve: ") + e.what());
  }
  if (c.with_surface && !(c.fluid.c_sigma > 0.0))
    fail("surface: requires fluid.c_sigma > 0");
  if (c.with_surface && c.contour.gamma < 1.0)
    fail("contour.gamma: surface solves need gamma >= 1");
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open: " + path);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// Data materialization
// ---------------------------------------------------------------------------

namespace {

// field name -> (interface slot, component) or f component
struct FieldId {
  enum class Group { g, h, d, f } group = Group::g;
  int comp = 0;
};

FieldId field_id(const std::string& name, int n) {
  FieldId id;
  if (name == "d") {
    id.group = FieldId::Group::d;
    return id;
  }
  if (name.size() == 2 &&
      (name[0] == 'g' || name[0] == 'h' || name[0] == 'f') && name[1] >= '1' &&
      name[1] <= '9') {
    id.comp = name[1] - '1';
    if (id.comp >= n) fail("data.field: component exceeds dimension: " + name);
    id.group = name[0] == 'g' ? FieldId::Group::g
                              : (name[0] == 'h' ? FieldId::Group::h : FieldId::Group::f);
    return id;
  }
  fail("data.field: expected g1..gn, h1..hn, f1..fn or d; got '" + name + "'");
}

std::size_t mode_from_signed(const GridSpec& g, int k1, int k2) {
  const int m1 = g.m1(), m2 = g.m2();
  if (k1 < -m1 / 2 || k1 >= (m1 + 1) / 2)
    fail("data.k: index " + std::to_string(k1) + " outside the grid's mode range");
  if (g.n == 3) {
    if (k2 < -m2 / 2 || k2 >= (m2 + 1) / 2)
      fail("data.k: index " + std::to_string(k2) + " outside the grid's mode range");
  } else if (k2 != 0) {
    fail("data.k: second index must be 0 for n = 2");
  }
  const int d1 = (k1 + m1) % m1;
  const int d2 = g.n == 3 ? (k2 + m2) % m2 : 0;
  return g.mode_index(d1, d2);
}

int kv_from_signed(const GridSpec& g, int kv) {
  const int M = g.n_vert_modes;
  if (kv < -M / 2 || kv >= (M + 1) / 2)
    fail("data.kv: index " + std::to_string(kv) + " outside the vertical mode range");
  return (kv + M) % M;
}

void set_field(const FieldId& id, const GridSpec& grid, std::size_t mode, int kv,
               cd value, InterfaceData& data, InteriorForce& force) {
  switch (id.group) {
    case FieldId::Group::g:
      data.g[id.comp][mode] += value;
      break;
    case FieldId::Group::h:
      data.h[id.comp][mode] += value;
      break;
    case FieldId::Group::d:
      data.d[mode] += value;
      break;
    case FieldId::Group::f:
      force.f[id.comp][mode * static_cast<std::size_t>(grid.n_vert_modes) +
                       static_cast<std::size_t>(kv)] += value;
      break;
  }
}

void load_data_csv(const std::string& path, const GridSpec& grid,
                   InterfaceData& data, InteriorForce& force) {
  std::ifstream f(path);
  if (!f) fail("data file: cannot open: " + path);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      // require the documented header row
      if (line != "k1,k2,kv,field,re,im")
        fail("data file: first row must be 'k1,k2,kv,field,re,im'");
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6)
      fail("data file line " + std::to_string(lineno) + ": expected 6 columns");
    try {
      const int k1 = std::stoi(cells[0]);
      const int k2 = std::stoi(cells[1]);
      const int kv = std::stoi(cells[2]);
      const FieldId id = field_id(cells[3], grid.n);
      const cd value(std::stod(cells[4]), std::stod(cells[5]));
      const std::size_t mode = mode_from_signed(grid, k1, k2);
      const int kvd = id.group == FieldId::Group::f ? kv_from_signed(grid, kv) : 0;
      set_field(id, grid, mode, kvd, value, data, force);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("data file line " + std::to_string(lineno) + ": malformed number");
    }
  }
  if (!header_seen) fail("data file: empty");
}

}  // namespace

void materialize_data(const DataSpec& spec, const GridSpec& grid,
                      InterfaceData& data, InteriorForce& force) {
  data = make_interface_data(grid);
  force = make_interior_force(grid);
  switch (spec.kind) {
    case DataSpec::Kind::zero:
      break;
    case DataSpec::Kind::single_mode: {
      const FieldId id = field_id(spec.field, grid.n);
      const std::size_t mode = mode_from_signed(grid, spec.k[0], spec.k[1]);
      if (grid.is_zero_mode(mode) && id.group != FieldId::Group::f)
        fail("data.k: interface data on the zero tangential mode is filtered");
      const int kvd =
          id.group == FieldId::Group::f ? kv_from_signed(grid, spec.kv) : 0;
      set_field(id, grid, mode, kvd, spec.value, data, force);
      break;
    }
    case DataSpec::Kind::random_band: {
      if (spec.band < 1) fail("data.band: must be >= 1");
      Rng rng(spec.seed);
      const int m1 = grid.m1(), m2 = grid.m2();
      const int b1 = std::min(spec.band, m1 / 2 - 1);
      const int b2 = grid.n == 3 ? std::min(spec.band, m2 / 2 - 1) : 0;
      for (int k1 = -b1; k1 <= b1; ++k1)
        for (int k2 = -b2; k2 <= b2; ++k2) {
          if (k1 == 0 && k2 == 0) continue;
          const std::size_t mode = mode_from_signed(grid, k1, k2);
          for (int c = 0; c < grid.n; ++c) {
            data.g[c][mode] = rng.unit_normalish();
            data.h[c][mode] = rng.unit_normalish();
          }
          data.d[mode] = rng.unit_normalish();
        }
      break;
    }
    case DataSpec::Kind::file:
      load_data_csv(spec.path, grid, data, force);
      break;
  }
  filter_zero_mode(grid, data);
  data.zero_mode_filtered = false;  // construction-time filtering is silent
}

}  // namespace stokes2p
