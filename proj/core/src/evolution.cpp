// evolution.cpp -- contour solves, reconstruction and transform-space checks.

#include "stokes2p/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stokes2p/grids.hpp"
#include "stokes2p/threads.hpp"

namespace stokes2p {

namespace {

constexpr cd kI{0.0, 1.0};
// sinh stretch depth; tails of the contour integrand are O(1/|tau|), so a
// fixed generous stretch keeps the truncation error below quadrature error.
const double kSMax = 6.0 * std::asinh(1.0);

InterfaceData scaled_data(const InterfaceData& d, const GridSpec& g, cd s) {
  InterfaceData out = d;
  for (int j = 0; j < g.n; ++j) {
    for (auto& v : out.g[j]) v *= s;
    for (auto& v : out.h[j]) v *= s;
  }
  for (auto& v : out.d) v *= s;
  return out;
}

InteriorForce scaled_force(const InteriorForce& f, const GridSpec& g, cd s) {
  InteriorForce out = f;
  for (int j = 0; j < g.n; ++j)
    for (auto& v : out.f[j]) v *= s;
  return out;
}

std::size_t pick_probe_mode(const EvolutionProblem& p) {
  const std::size_t m_count = p.grid.mode_count();
  for (std::size_t m = 1; m < m_count; ++m) {
    for (int j = 0; j < p.grid.n; ++j)
      if (p.data.g[j][m] != cd{} || p.data.h[j][m] != cd{}) return m;
    if (p.data.d[m] != cd{}) return m;
    if (!p.force.zero()) {
      const std::size_t base = m * static_cast<std::size_t>(p.grid.n_vert_modes);
      for (int j = 0; j < p.grid.n; ++j)
        for (int kv = 0; kv < p.grid.n_vert_modes; ++kv)
          if (p.force.f[j][base + static_cast<std::size_t>(kv)] != cd{}) return m;
    }
  }
  return 0;
}

// Simpson coefficients on [0, T] with n_t (even) intervals.
double simpson_coef(int k, int n_t) {
  if (k == 0 || k == n_t) return 1.0;
  return k % 2 == 1 ? 4.0 : 2.0;
}

}  // namespace

void ContourSpec::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("ContourSpec: gamma must be positive");
  if (nodes < 8) throw std::invalid_argument("ContourSpec: need at least 8 nodes");
  if (!(tau_max > 0.0)) throw std::invalid_argument("ContourSpec: tau_max must be positive");
}

void TimeSpec::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("TimeSpec: T must be positive");
  if (n_t < 8 || n_t % 2 != 0)
    throw std::invalid_argument("TimeSpec: n_t must be even and >= 8");
}

cd profile_laplace(TimeProfile p, double a, cd lambda) {
  switch (p) {
    case TimeProfile::step:
      return 1.0 / lambda;
    case TimeProfile::step_exp:
      return 1.0 / (lambda - a);
    case TimeProfile::step_relax:
      return 1.0 / lambda - 1.0 / (lambda + 1.0);
  }
  return {};
}

double profile_value(TimeProfile p, double a, double t) {
  if (t < 0.0) return 0.0;
  switch (p) {
    case TimeProfile::step:
      return 1.0;
    case TimeProfile::step_exp:
      return std::exp(a * t);
    case TimeProfile::step_relax:
      return 1.0 - std::exp(-t);
  }
  return 0.0;
}

EvolutionSolution solve_evolution(const EvolutionProblem& prob,
                                  const ContourSpec& contour, const TimeSpec& time,
                                  int threads) {
  contour.validate();
  time.validate();
  prob.grid.validate();
  prob.fp.validate();
  if (prob.with_surface && contour.gamma < 1.0)
    throw std::invalid_argument("solve_evolution: surface solves need gamma >= 1");
  if (prob.with_surface && !(prob.fp.c_sigma > 0.0))
    throw std::invalid_argument("solve_evolution: surface solves need c_sigma > 0");

  EvolutionSolution sol;
  sol.prob = prob;
  sol.contour = contour;
  sol.time = time;
  sol.probe_mode = pick_probe_mode(prob);

  const SinhGrid sg = sinh_grid(contour.tau_max, kSMax, contour.nodes);
  const std::size_t M = sg.tau.size();
  sol.nodes.resize(M);
  sol.probe_un.assign(M, cd{});
  sol.probe_eta.assign(M, cd{});

  const int nn = prob.grid.n;
  parallel_chunks(M, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      const cd lam = cd(contour.gamma, sg.tau[m]);
      const cd s = profile_laplace(prob.profile, prob.profile_param, lam);
      const InterfaceData d = scaled_data(prob.data, prob.grid, s);
      const InteriorForce f = scaled_force(prob.force, prob.grid, s);
      const TwoPhaseField field =
          prob.with_surface ? solve_rswith(prob.grid, f, d, lam, prob.fp)
                            : solve_rswithout(prob.grid, f, d, lam, prob.fp);
      ContourNode& node = sol.nodes[m];
      node.lambda = lam;
      node.weight = sg.weight[m];
      node.norms = norms_and_ratio(field, &f, &d, 2);
      if (sol.probe_mode != 0) {
        sol.probe_un[m] = field.trace(sol.probe_mode, Side::plus).u[nn - 1];
        if (prob.with_surface) sol.probe_eta[m] = field.eta[sol.probe_mode];
      }
    }
  });

  // reconstruct probe trajectories: U(t) = (1/2pi) sum w_m e^{lambda_m t} u^_m
  sol.times.resize(static_cast<std::size_t>(time.n_t) + 1);
  sol.traj_un.assign(sol.times.size(), cd{});
  sol.traj_eta.assign(sol.times.size(), cd{});
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const double t = time.T * static_cast<double>(k) / time.n_t;
    sol.times[k] = t;
    cd un{}, eta{};
    for (std::size_t m = 0; m < M; ++m) {
      const cd e = std::exp(sol.nodes[m].lambda * t) * sol.nodes[m].weight;
      un += e * sol.probe_un[m];
      eta += e * sol.probe_eta[m];
    }
    sol.traj_un[k] = un / (2.0 * pi);
    sol.traj_eta[k] = eta / (2.0 * pi);
  }
  return sol;
}

double roundtrip_error(const EvolutionSolution& sol, cd lambda_star) {
  const TimeSpec& tm = sol.time;
  const double dt = tm.T / tm.n_t;

  // Forward Laplace of the reconstruction, with the contour sum pulled out:
  //   Int_0^T e^{-lambda* t} U(t) dt
  //     = (1/2pi) sum_m w_m u^_m kappa_m,
  //   kappa_m = Simpson_k e^{(lambda_m - lambda*) t_k},
  // so no dense trajectory enters and the exponents stay decaying.
  cd acc{};
  for (std::size_t m = 0; m < sol.nodes.size(); ++m) {
    if (sol.probe_un[m] == cd{}) continue;
    const cd mu = sol.nodes[m].lambda - lambda_star;
    cd kappa{};
    for (int k = 0; k <= tm.n_t; ++k)
      kappa += simpson_coef(k, tm.n_t) * std::exp(mu * (dt * k));
    kappa *= dt / 3.0;
    acc += sol.nodes[m].weight * sol.probe_un[m] * kappa;
  }
  acc /= 2.0 * pi;

  // Direct resolvent value at lambda*.
  const EvolutionProblem& p = sol.prob;
  const cd s = profile_laplace(p.profile, p.profile_param, lambda_star);
  const InterfaceData d = scaled_data(p.data, p.grid, s);
  const InteriorForce f = scaled_force(p.force, p.grid, s);
  const TwoPhaseField field =
      p.with_surface ? solve_rswith(p.grid, f, d, lambda_star, p.fp)
                     : solve_rswithout(p.grid, f, d, lambda_star, p.fp);
  const cd direct = field.trace(sol.probe_mode, Side::plus).u[p.grid.n - 1];

  if (direct == cd{}) return std::abs(acc);
  return std::abs(acc - direct) / std::abs(direct);
}

double causality_error(const EvolutionSolution& sol) {
  double sup = 0.0;
  for (const cd& v : sol.traj_un) sup = std::max(sup, std::abs(v));
  for (const cd& v : sol.traj_eta) sup = std::max(sup, std::abs(v));
  if (sup == 0.0) return 0.0;
  return std::max(std::abs(sol.traj_un.front()), std::abs(sol.traj_eta.front())) / sup;
}

MaxRegReport maxreg_ratio(const EvolutionSolution& sol) {
  // p = q = 2 only: Plancherel in t turns each mixed norm into a contour
  // integral (1/2pi) Int |multiplier(lambda)|^2 |norm(lambda)|^2 d tau.
  MaxRegReport rep;
  const double gamma = sol.contour.gamma;
  double lhs2 = 0, rhs2 = 0, y2 = 0;
  double y32_num = 0, y32_den = 0, y2_num = 0, y2_den = 0;
  for (const ContourNode& node : sol.nodes) {
    const double w = node.weight / (2.0 * pi);
    const double absl = std::abs(node.lambda);
    const RatioReport& r = node.norms;
    const double u_l2 = absl > 0 ? r.lam_u / absl : 0.0;  // ||u||_{L_2}
    double l = 0;
    l += r.lam_u * r.lam_u;                // d_t U
    l += gamma * gamma * u_l2 * u_l2;      // gamma U
    l += r.sqlam_grad_u * r.sqlam_grad_u;  // Lambda^{1/2} grad U
    l += r.grad2_u * r.grad2_u;
    l += r.grad_theta * r.grad_theta;
    lhs2 += w * l;
    double rr = r.f_norm * r.f_norm + r.g_terms * r.g_terms + r.h_terms * r.h_terms;
    if (sol.prob.with_surface) {
      rr += r.d_w2 * r.d_w2;
      const double eta_w2_l2 = absl > 0 ? r.eta_w2 / absl : 0.0;  // ||eta||_{W^2}
      double y = 0;
      y += r.eta_w2 * r.eta_w2;                    // d_t Y in W^2
      y += gamma * gamma * eta_w2_l2 * eta_w2_l2;  // gamma Y in W^2
      y += r.eta_w3 * r.eta_w3;                    // Y in W^3
      y2 += w * y;
      lhs2 += w * y;
      // separately reported interpolation rows
      y32_num += w * std::pow(absl, 3.0) * r.eta_w1_raw * r.eta_w1_raw;
      y32_den += w * absl * r.d_w1_raw * r.d_w1_raw;
      y2_num += w * std::pow(absl, 4.0) * r.eta_l0_raw * r.eta_l0_raw;
      y2_den += w * absl * absl * r.d_l0_raw * r.d_l0_raw;
    }
    rhs2 += w * rr;
  }
  rep.lhs = std::sqrt(lhs2);
  rep.rhs = std::sqrt(rhs2);
  rep.y_terms = std::sqrt(y2);
  if (rep.rhs > 0.0) {
    rep.ratio = rep.lhs / rep.rhs;
    const double den32 = std::sqrt(rhs2 + y32_den);
    const double den2 = std::sqrt(rhs2 + y2_den);
    rep.y_extra_32 = den32 > 0 ? std::sqrt(y32_num) / den32 : 0.0;
    rep.y_extra_2 = den2 > 0 ? std::sqrt(y2_num) / den2 : 0.0;
  } else {
    rep.inconsistent = rep.lhs > 1e-12;
  }
  return rep;
}

}  // namespace stokes2p
