// boundary.cpp -- per-mode boundary and surface solves.

#include "stokes2p/boundary.hpp"

#include <algorithm>
#include <cmath>

namespace stokes2p {

ModeSolution boundary_solve_mode(const SymbolTable& tbl, const ModeJumps& jumps) {
  ModeSolution sol;
  sol.tbl = tbl;
  const int n = tbl.n;
  for (Side s : {Side::plus, Side::minus}) {
    const int si = ModeSolution::sidx(s);
    for (int j = 0; j < n; ++j) {
      CoefPair acc;
      for (int k = 0; k < n; ++k) {
        const CoefPair pg = phi_coef(tbl, k, s, j);
        const CoefPair ph = psi_coef(tbl, k, s, j);
        acc.cM += pg.cM * jumps.g[k] + ph.cM * jumps.h[k];
        acc.cE += pg.cE * jumps.g[k] + ph.cE * jumps.h[k];
      }
      sol.uc[si][j] = acc;
    }
    cd p{};
    for (int k = 0; k < n; ++k)
      p += chi_coef(tbl, k, s) * jumps.g[k] + omega_coef(tbl, k, s) * jumps.h[k];
    sol.pc[si] = p;
  }
  return sol;
}

ModeEval ModeSolution::eval(Side s, double x_n) const {
  ModeEval e;
  const Basis b = eval_basis(tbl, s, x_n);
  const int si = sidx(s);
  for (int j = 0; j < tbl.n; ++j) {
    e.u[j] = eval_pair(uc[si][j], b, 0);
    e.du[j] = eval_pair(uc[si][j], b, 1);
    e.d2u[j] = eval_pair(uc[si][j], b, 2);
    e.d3u[j] = eval_pair(uc[si][j], b, 3);
  }
  e.theta = pc[si] * b.eA[0];
  e.dtheta = pc[si] * b.eA[1];
  return e;
}

SurfaceSolution surface_solve_mode(const SymbolTable& tbl, cd d_tilde) {
  SurfaceSolution s;
  const cd weight = tbl.fp.jump_rho() * tbl.fp.c_g - tbl.fp.c_sigma * tbl.A * tbl.A;
  s.eta = tbl.detL_direct * d_tilde / tbl.lopatinskii;
  ModeJumps eff;
  eff.g[tbl.n - 1] = -weight * s.eta;
  s.w = boundary_solve_mode(tbl, eff);
  return s;
}

ModeResidual mode_residual(const ModeSolution& sol, const ModeJumps& jumps,
                           const double* xs, int n_xs) {
  ModeResidual r;
  const SymbolTable& t = sol.tbl;
  const int n = t.n;
  cd xi2{};
  for (int j = 0; j < n - 1; ++j) xi2 += t.xi[j] * t.xi[j];

  for (int i = 0; i < n_xs; ++i) {
    for (Side s : {Side::plus, Side::minus}) {
      const double x = sign_of(s) * std::abs(xs[i]);
      const ModeEval e = sol.eval(s, x);
      const double rho = t.fp.rho(s), mu = t.fp.mu(s);
      // momentum rows: rho lambda u + mu (A^2 - d_n^2) u + grad theta = 0
      for (int j = 0; j < n - 1; ++j) {
        const cd res = rho * t.lambda * e.u[j] + mu * (xi2 * e.u[j] - e.d2u[j]) +
                       cd(0, 1) * t.xi[j] * e.theta;
        r.interior = std::max(r.interior, std::abs(res));
      }
      const cd resn =
          rho * t.lambda * e.u[n - 1] + mu * (xi2 * e.u[n - 1] - e.d2u[n - 1]) + e.dtheta;
      r.interior = std::max(r.interior, std::abs(resn));
      cd div{};
      for (int j = 0; j < n - 1; ++j) div += cd(0, 1) * t.xi[j] * e.u[j];
      div += e.du[n - 1];
      r.divergence = std::max(r.divergence, std::abs(div));
    }
  }

  // Interface rows at x_n = 0 (one-sided traces).
  const ModeEval up = sol.trace(Side::plus);
  const ModeEval um = sol.trace(Side::minus);
  const double mp = t.fp.mu_plus, mm = t.fp.mu_minus;
  for (int j = 0; j < n - 1; ++j) {
    const cd lhs = mp * (cd(0, 1) * t.xi[j] * up.u[n - 1] + up.du[j]) -
                   mm * (cd(0, 1) * t.xi[j] * um.u[n - 1] + um.du[j]);
    r.jumps = std::max(r.jumps, std::abs(lhs + jumps.g[j]));
  }
  const cd lhs_n =
      (2.0 * mp * up.du[n - 1] - up.theta) - (2.0 * mm * um.du[n - 1] - um.theta);
  r.jumps = std::max(r.jumps, std::abs(lhs_n + jumps.g[n - 1]));
  for (int j = 0; j < n; ++j)
    r.jumps = std::max(r.jumps, std::abs((up.u[j] - um.u[j]) - jumps.h[j]));
  return r;
}

}  // namespace stokes2p
