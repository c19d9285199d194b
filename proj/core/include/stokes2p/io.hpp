// io.hpp -- deterministic report emission and strict config parsing.
//
// All tabular output is CSV with shortest round-trip number formatting
// (std::to_chars), so reports are byte-identical for a fixed (config, seed)
// regardless of thread count.  Every report carries a config-hash comment
// header.  Field dumps are a one-line JSON header followed by raw
// little-endian complex doubles, row-major.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stokes2p/certifier.hpp"
#include "stokes2p/evolution.hpp"
#include "stokes2p/resolvent.hpp"

namespace stokes2p {

// Configuration/data errors; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting / hashing
// ---------------------------------------------------------------------------

// Shortest decimal string that round-trips the double.
std::string fmt_double(double v);
std::string fmt_complex(cd v);  // "re:im"

// FNV-1a 64-bit hash, hex encoded; used for config-hash report headers.
std::string fnv1a_hex(const std::string& bytes);

// Minimal CSV assembly: "# key=value" comment headers, then one header row.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void comment(const std::string& key, const std::string& value);
  void row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> comments_;
  std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

Csv bound_report_csv(const std::vector<BoundReport>& reports,
                     const std::string& config_hash);

// ---------------------------------------------------------------------------
// Binary field dumps
// ---------------------------------------------------------------------------

struct FieldDumpHeader {
  int n = 0;
  int m1 = 0, m2 = 0;
  int n_vertical = 0;
  int components = 0;  // n velocities + 1 pressure
  double X = 0.0;
  double L[2] = {0.0, 0.0};
  cd lambda{};
};

// Layout: side (plus, minus) x vertical node (ascending |x_n|) x tangential
// point (row-major) x component (u_1..u_n, theta), complex128 little-endian.
void dump_field(const std::string& path, const TwoPhaseField& field);
void read_field_dump(const std::string& path, FieldDumpHeader& header,
                     std::vector<cd>& values);

// ---------------------------------------------------------------------------
// Config structs (strict JSON schema; unknown keys rejected)
// ---------------------------------------------------------------------------

struct LambdaSweepSpec {
  std::vector<double> args;      // ray angles (radians)
  double radius_min = 1e-2;
  double radius_max = 1e4;
  int points = 13;               // per ray, log-spaced
};

struct DataSpec {
  enum class Kind { zero, single_mode, random_band, file } kind = Kind::zero;
  // single_mode
  std::string field = "h3";  // g1..g3, h1..h3, d, f1..f3
  int k[2] = {1, 0};
  int kv = 0;                // vertical index for f fields
  cd value{1.0, 0.0};
  // random_band
  int band = 2;
  std::uint64_t seed = 1;
  // file
  std::string path;
};

struct CertifyConfig {
  FluidParams fluid;
  SectorSampling sector;
  CertifyLimits limits;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: resolve via flag/env
};

struct SolveConfig {
  FluidParams fluid;
  GridSpec grid;
  std::vector<cd> lambdas;                  // explicit list
  std::optional<LambdaSweepSpec> sweep;     // or a ray sweep
  DataSpec data;
  bool with_surface = false;
  int q = 2;
  double tolerance = 1e-8;
  bool dump_fields = false;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct EvolveConfig {
  FluidParams fluid;
  GridSpec grid;
  ContourSpec contour;
  TimeSpec time;
  TimeProfile profile = TimeProfile::step_relax;
  double profile_param = 0.0;
  DataSpec data;
  bool with_surface = false;
  double roundtrip_lambda = 3.0;
  double tolerance = 1e-3;  // round-trip / causality gate
  std::uint64_t seed = 1;
  int threads = 0;
};

// Parse + validate; throws ConfigError on syntax, schema or invariant issues.
CertifyConfig parse_certify_config(const std::string& text);
SolveConfig parse_solve_config(const std::string& text);
EvolveConfig parse_evolve_config(const std::string& text);

std::string read_text_file(const std::string& path);

// Materialize the data spec on a grid.  File data: CSV with columns
// k1,k2,kv,field,re,im (signed k-indices; kv used by f fields only).
void materialize_data(const DataSpec& spec, const GridSpec& grid,
                      InterfaceData& data, InteriorForce& force);

}  // namespace stokes2p
