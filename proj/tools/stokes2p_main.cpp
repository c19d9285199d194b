// stokes2p -- command-line driver: certify | solve | evolve | sweep.
//
// Exit codes: 0 success, 1 check failure, 2 configuration error.
// Reports are CSV with a config-hash header and are byte-identical for a
// fixed (config, seed) regardless of --threads.

#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stokes2p/certifier.hpp"
#include "stokes2p/evolution.hpp"
#include "stokes2p/grids.hpp"
#include "stokes2p/io.hpp"
#include "stokes2p/resolvent.hpp"
#include "stokes2p/threads.hpp"

namespace {

using namespace stokes2p;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads_flag = 0;
};

std::string out_path(const CommonArgs& a, const std::string& name) {
  return (std::filesystem::path(a.out_dir) / name).string();
}

std::string config_hash(const std::string& text, std::uint64_t seed) {
  return fnv1a_hex(text + "\nseed=" + std::to_string(seed));
}

// ---------------------------------------------------------------------------

int cmd_certify(const CommonArgs& args) {
  const std::string text = read_text_file(args.config_path);
  CertifyConfig cfg = parse_certify_config(text);
  if (args.seed) cfg.seed = *args.seed;
  const int threads = resolve_thread_count(args.threads_flag, cfg.threads);

  const std::vector<BoundReport> reports =
      run_all_checks(cfg.sector, cfg.seed, cfg.fluid, cfg.limits, threads);

  Csv csv = bound_report_csv(reports, config_hash(text, cfg.seed));
  csv.write(out_path(args, "certify_report.csv"));

  bool all_pass = true;
  for (const BoundReport& r : reports) {
    if (!r.pass) {
      std::fprintf(stderr, "certify: bound %s failed (worst ratio %.6g)\n",
                   r.bound_id.c_str(), r.worst_ratio);
      all_pass = false;
    }
  }
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SolveRow {
  cd lambda{};
  double ray_arg = 0.0;
  ResidualReport res;
  RatioReport ratio;
};

SolveRow solve_one(const SolveConfig& cfg, const InterfaceData& data,
                   const InteriorForce& force, cd lambda) {
  SolveRow row;
  row.lambda = lambda;
  const TwoPhaseField field =
      cfg.with_surface ? solve_rswith(cfg.grid, force, data, lambda, cfg.fluid)
                       : solve_rswithout(cfg.grid, force, data, lambda, cfg.fluid);
  row.res = residual_report(field, &force, &data);
  row.ratio = norms_and_ratio(field, &force, &data, cfg.q);
  return row;
}

std::vector<std::string> ratio_cells(const SolveRow& r) {
  return {fmt_double(r.ratio.lhs),          fmt_double(r.ratio.rhs),
          fmt_double(r.ratio.ratio),        fmt_double(r.ratio.eta_w2),
          fmt_double(r.ratio.eta_w3),       fmt_double(r.ratio.d_w2),
          fmt_double(r.ratio.eta_w1_ratio), fmt_double(r.ratio.eta_l0_ratio)};
}

int cmd_solve(const CommonArgs& args) {
  const std::string text = read_text_file(args.config_path);
  SolveConfig cfg = parse_solve_config(text);
  if (args.seed) cfg.seed = *args.seed;
  if (cfg.data.kind == DataSpec::Kind::random_band) cfg.data.seed = cfg.seed;
  const int threads = resolve_thread_count(args.threads_flag, cfg.threads);

  InterfaceData data;
  InteriorForce force;
  materialize_data(cfg.data, cfg.grid, data, force);

  std::vector<cd> lambdas = cfg.lambdas;
  if (cfg.sweep) {
    lambdas.clear();
    for (double a : cfg.sweep->args) {
      const std::vector<double> radii =
          log_space(cfg.sweep->radius_min, cfg.sweep->radius_max, cfg.sweep->points);
      for (double r : radii) lambdas.push_back(std::polar(r, a));
    }
  }

  std::vector<SolveRow> rows(lambdas.size());
  parallel_chunks(lambdas.size(), threads,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i)
                      rows[i] = solve_one(cfg, data, force, lambdas[i]);
                  });

  Csv csv({"lambda_re",   "lambda_im",   "abs_lambda",  "q",
           "momentum",    "divergence",  "stress_jump", "velocity_jump",
           "kinematic",   "momentum_fd", "momentum_fd_l2", "decay_envelope",
           "lhs",         "rhs",         "ratio",       "eta_w2",
           "eta_w3",      "d_w2",        "eta_w1_ratio", "eta_l0_ratio"});
  csv.comment("config_hash", config_hash(text, cfg.seed));
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SolveRow& r = rows[i];
    std::vector<std::string> cells = {
        fmt_double(r.lambda.real()),  fmt_double(r.lambda.imag()),
        fmt_double(std::abs(r.lambda)), std::to_string(cfg.q),
        fmt_double(r.res.momentum),   fmt_double(r.res.divergence),
        fmt_double(r.res.stress_jump), fmt_double(r.res.velocity_jump),
        fmt_double(r.res.kinematic),  fmt_double(r.res.momentum_fd),
        fmt_double(r.res.momentum_fd_l2), fmt_double(r.res.decay_envelope)};
    for (std::string& c : ratio_cells(r)) cells.push_back(std::move(c));
    csv.row(cells);

    const double worst =
        std::max({r.res.momentum, r.res.divergence, r.res.stress_jump,
                  r.res.velocity_jump, r.res.kinematic});
    if (worst > cfg.tolerance) {
      std::fprintf(stderr,
                   "solve: analytic residual %.3e above tolerance %.3e at "
                   "lambda = %.6g%+.6gi\n",
                   worst, cfg.tolerance, r.lambda.real(), r.lambda.imag());
      ok = false;
    }
    if (r.ratio.inconsistent) {
      std::fprintf(stderr, "solve: nonzero solution with zero data norm\n");
      ok = false;
    }
    if (cfg.dump_fields) {
      const TwoPhaseField field =
          cfg.with_surface
              ? solve_rswith(cfg.grid, force, data, r.lambda, cfg.fluid)
              : solve_rswithout(cfg.grid, force, data, r.lambda, cfg.fluid);
      dump_field(out_path(args, "field_" + std::to_string(i) + ".bin"), field);
    }
  }
  csv.write(out_path(args, "solve_report.csv"));
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const CommonArgs& args) {
  const std::string text = read_text_file(args.config_path);
  SolveConfig cfg = parse_solve_config(text);
  if (args.seed) cfg.seed = *args.seed;
  if (cfg.data.kind == DataSpec::Kind::random_band) cfg.data.seed = cfg.seed;
  const int threads = resolve_thread_count(args.threads_flag, cfg.threads);

  InterfaceData data;
  InteriorForce force;
  materialize_data(cfg.data, cfg.grid, data, force);

  // ray grid: (arg, |lambda| ascending); an explicit list sweeps as given
  std::vector<cd> lambdas;
  std::vector<double> ray_args;
  if (cfg.sweep) {
    for (double a : cfg.sweep->args) {
      const std::vector<double> radii =
          log_space(cfg.sweep->radius_min, cfg.sweep->radius_max, cfg.sweep->points);
      for (double r : radii) {
        lambdas.push_back(std::polar(r, a));
        ray_args.push_back(a);
      }
    }
  } else {
    for (cd l : cfg.lambdas) {
      lambdas.push_back(l);
      ray_args.push_back(std::arg(l));
    }
  }

  std::vector<SolveRow> rows(lambdas.size());
  parallel_chunks(lambdas.size(), threads,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                      rows[i] = solve_one(cfg, data, force, lambdas[i]);
                      rows[i].ray_arg = ray_args[i];
                    }
                  });

  Csv csv({"ray_arg", "abs_lambda", "lambda_re", "lambda_im", "lhs", "rhs", "ratio",
           "eta_w2", "eta_w3", "d_w2", "eta_w1_ratio", "eta_l0_ratio"});
  csv.comment("config_hash", config_hash(text, cfg.seed));
  bool ok = true;
  for (const SolveRow& r : rows) {
    std::vector<std::string> cells = {fmt_double(r.ray_arg),
                                      fmt_double(std::abs(r.lambda)),
                                      fmt_double(r.lambda.real()),
                                      fmt_double(r.lambda.imag())};
    for (std::string& c : ratio_cells(r)) cells.push_back(std::move(c));
    csv.row(cells);
    if (r.ratio.inconsistent) {
      std::fprintf(stderr, "sweep: nonzero solution with zero data norm\n");
      ok = false;
    }
  }
  csv.write(out_path(args, "sweep_report.csv"));
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_evolve(const CommonArgs& args) {
  const std::string text = read_text_file(args.config_path);
  EvolveConfig cfg = parse_evolve_config(text);
  if (args.seed) cfg.seed = *args.seed;
  if (cfg.data.kind == DataSpec::Kind::random_band) cfg.data.seed = cfg.seed;
  const int threads = resolve_thread_count(args.threads_flag, cfg.threads);

  if (cfg.profile == TimeProfile::step_exp && cfg.profile_param >= cfg.contour.gamma) {
    std::fprintf(stderr,
                 "evolve: contour abscissa gamma = %.6g does not dominate the "
                 "data growth rate %.6g; the Laplace transform diverges on the "
                 "contour\n",
                 cfg.contour.gamma, cfg.profile_param);
    return 1;
  }
  if (!(cfg.roundtrip_lambda > cfg.contour.gamma))
    throw ConfigError("roundtrip_lambda: must exceed contour.gamma");

  EvolutionProblem prob;
  prob.grid = cfg.grid;
  prob.fp = cfg.fluid;
  prob.with_surface = cfg.with_surface;
  prob.profile = cfg.profile;
  prob.profile_param = cfg.profile_param;
  materialize_data(cfg.data, cfg.grid, prob.data, prob.force);

  const EvolutionSolution sol = solve_evolution(prob, cfg.contour, cfg.time, threads);
  const double rt = roundtrip_error(sol, cd(cfg.roundtrip_lambda, 0.0));
  const double caus = causality_error(sol);
  const MaxRegReport mr = maxreg_ratio(sol);

  Csv csv({"t", "un_re", "un_im", "eta_re", "eta_im"});
  csv.comment("config_hash", config_hash(text, cfg.seed));
  csv.comment("roundtrip_error", fmt_double(rt));
  csv.comment("causality_error", fmt_double(caus));
  csv.comment("maxreg_lhs", fmt_double(mr.lhs));
  csv.comment("maxreg_rhs", fmt_double(mr.rhs));
  csv.comment("maxreg_ratio", fmt_double(mr.ratio));
  csv.comment("maxreg_y_terms", fmt_double(mr.y_terms));
  csv.comment("maxreg_y_extra_32", fmt_double(mr.y_extra_32));
  csv.comment("maxreg_y_extra_2", fmt_double(mr.y_extra_2));
  for (std::size_t k = 0; k < sol.times.size(); ++k)
    csv.row({fmt_double(sol.times[k]), fmt_double(sol.traj_un[k].real()),
             fmt_double(sol.traj_un[k].imag()), fmt_double(sol.traj_eta[k].real()),
             fmt_double(sol.traj_eta[k].imag())});
  csv.write(out_path(args, "evolve_report.csv"));

  bool ok = true;
  const bool has_data = sol.probe_mode != 0;
  if (has_data && rt > cfg.tolerance) {
    std::fprintf(stderr, "evolve: round-trip error %.3e above tolerance %.3e\n", rt,
                 cfg.tolerance);
    ok = false;
  }
  if (has_data && caus > cfg.tolerance && cfg.profile == TimeProfile::step_relax) {
    std::fprintf(stderr, "evolve: causality error %.3e above tolerance %.3e\n", caus,
                 cfg.tolerance);
    ok = false;
  }
  if (mr.inconsistent) {
    std::fprintf(stderr, "evolve: nonzero solution with zero data norm\n");
    ok = false;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-phase Stokes resolvent/evolution spectral solver"};
  app.require_subcommand(1);

  CommonArgs args;
  long long seed_flag = -1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "config file (JSON)")->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", seed_flag, "override config seed");
    sub->add_option("--threads", args.threads_flag,
                    "worker threads (overrides STOKES2P_THREADS and config)");
  };

  CLI::App* certify = app.add_subcommand("certify", "run symbol-bound sweeps");
  CLI::App* solve = app.add_subcommand("solve", "solve resolvent problems");
  CLI::App* evolve = app.add_subcommand("evolve", "solve the evolution problem");
  CLI::App* sweep = app.add_subcommand("sweep", "lambda-ray ratio sweeps");
  for (CLI::App* sub : {certify, solve, evolve, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (seed_flag >= 0) args.seed = static_cast<std::uint64_t>(seed_flag);

  try {
    std::filesystem::create_directories(args.out_dir);
    if (certify->parsed()) return cmd_certify(args);
    if (solve->parsed()) return cmd_solve(args);
    if (evolve->parsed()) return cmd_evolve(args);
    if (sweep->parsed()) return cmd_sweep(args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
