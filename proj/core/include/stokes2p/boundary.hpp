// boundary.hpp
//
// Per-tangential-mode solves.  A mode is one (lambda, xi') pair; the solver
// aggregates the closed-form symbols against the jump data
// ([[g_k]], [[h_k]]) into coefficient pairs per velocity component and a
// pressure coefficient per side, after which field values and analytic
// x_n-derivatives at any vertical position cost a handful of exponentials.

#pragma once

#include <array>

#include "stokes2p/symbols.hpp"

namespace stokes2p {

// Jump coefficients of one tangential mode, components 0..n-1.
struct ModeJumps {
  std::array<cd, 3> g{};  // [[g]]
  std::array<cd, 3> h{};  // [[h]]
};

// Velocity/pressure values and d/dx_n derivatives at one vertical point.
struct ModeEval {
  std::array<cd, 3> u{};
  std::array<cd, 3> du{};
  std::array<cd, 3> d2u{};
  std::array<cd, 3> d3u{};
  cd theta{};
  cd dtheta{};
};

// Aggregated per-mode solution of the boundary-data problem (f = 0).
struct ModeSolution {
  SymbolTable tbl;
  CoefPair uc[2][3];  // [side][component], side 0 = plus, 1 = minus
  cd pc[2]{};         // pressure coefficient per side (times e^{-+ A x})

  static int sidx(Side s) { return s == Side::plus ? 0 : 1; }

  ModeEval eval(Side s, double x_n) const;
  // One-sided traces at x_n = 0.
  ModeEval trace(Side s) const { return eval(s, 0.0); }
};

ModeSolution boundary_solve_mode(const SymbolTable& tbl, const ModeJumps& jumps);

// Surface-coupled correction for one mode: solves
//   lambda eta + w_n = d_tilde  on the interface,
// with the stress jump carrying -([[rho]] c_g + c_sigma Delta') eta nu, via
//   eta = detL d_tilde / Lcal,   effective [[g_n]] = -([[rho]] c_g - c_sigma A^2) eta.
struct SurfaceSolution {
  cd eta{};
  ModeSolution w;  // velocity/pressure correction driven by the effective jump
};

SurfaceSolution surface_solve_mode(const SymbolTable& tbl, cd d_tilde);

// Residuals of the six boundary-problem rows for one solved mode, measured
// with analytic derivatives: interior momentum (tangential rows and the
// normal row), the divergence row, and the interface jump rows.
struct ModeResidual {
  double interior = 0.0;    // max over sampled x_n of the momentum rows
  double divergence = 0.0;  // max over sampled x_n of |i xi . u' + d_n u_n|
  double jumps = 0.0;       // max over the 2n interface rows
};

ModeResidual mode_residual(const ModeSolution& sol, const ModeJumps& jumps,
                           const double* xs, int n_xs);

}  // namespace stokes2p
