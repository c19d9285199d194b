// symbols.hpp
//
// Closed-form Fourier-multiplier symbols of the two-phase Stokes resolvent
// problem with a flat interface at x_n = 0.
//
// Per tangential frequency xi' and resolvent parameter lambda the solution of
//
//   rho lambda u - Div(mu D(u) - theta I) = 0,   div u = 0   in  x_n != 0,
//   [[mu(d_n u_j + i xi_j u_n)]] = -[[g_j]],  [[2 mu d_n u_n - theta]] = -[[g_n]],
//   [[u]] = [[h]]
//
// is an explicit combination of the exponentials e^{-+ B x_n}, e^{-+ A x_n}
// and the kernel M_{+-}(x_n) = (e^{-+ B x_n} - e^{-+ A x_n})/(B - A), with
//
//   A  = sqrt(sum_j xi_j^2),  B_{+-} = sqrt(rho_{+-} lambda / mu_{+-} + A^2),
//
// both square roots taken with positive real part.  The coefficients come
// from a 4x4 boundary system L X = R [[data]] solved in closed form (adjugate
// over determinant), plus a scalar 2x2 system for the tangential components.
//
// Every symbol here is evaluated with analytic x_n-derivatives up to third
// order through the exact identities
//
//   d_n M_+ = -e^{-B x} - A M_+,          d_n M_- = e^{B x} + A M_-,
//   d_n^2 M_+- = (A+B) e^{-+B x} + A^2 M_+-,
//   d_n^3 M_+ = -(A^2+AB+B^2) e^{-B x} - A^3 M_+   (mirrored on the minus side),
//
// never by numerical differentiation.

#pragma once

#include <array>

#include "stokes2p/types.hpp"

namespace stokes2p {

// Principal square root restricted to C \ (-inf, 0]; result has Re > 0.
cd sqrt_positive_real(cd z);

struct Roots {
  cd A{};        // sqrt(sum xi_j^2), Re > 0
  cd B_plus{};   // sqrt(rho_+ lambda / mu_+ + A^2), Re > 0
  cd B_minus{};
  double A_tilde = 0.0;  // sqrt(sum |xi_j|^2) >= |A|
};

Roots compute_roots(const SpectralPoint& p, const FluidParams& fp);

// M_{+-} kernel and derivatives; side selects the phase (x_n > 0 for plus).
// order in 0..3.  Stable as B -> A via  M_+ = -x e^{-A x} phi1(-(B-A)x),
// phi1(z) = (e^z - 1)/z  with a series kernel for |z| < 1e-3.
cd m_kernel(cd A, cd B, double x_n, Side side, int order);

// Everything derived from one (lambda, xi') point.  a is the 4 x 2n
// coefficient matrix (det L)^{-1} Cof(L) R, with data columns ordered
// [g_1..g_{n-1}, g_n, h_1..h_{n-1}, h_n].
struct SymbolTable {
  int n = 2;
  cd lambda{};
  std::array<cd, 2> xi{};
  FluidParams fp{};

  cd A{}, B_plus{}, B_minus{};
  double A_tilde = 0.0;
  cd sqrt_lambda{};

  cd L[4][4]{};
  cd detL_closed{};            // closed-form polynomial in (A, B+-, mu+-)
  cd detL_direct{};            // direct 4x4 expansion (consistency witness)
  cd cofactor[4][4]{};         // adjugate: L^{-1} = cofactor / detL
  cd a[4][6]{};                // 4 x 2n, columns as documented above
  cd lopatinskii{};            // Lcal = lambda detL - A {mu+(B++A)+mu-(B-+A)} ([[rho]] c_g - c_sigma A^2)

  cd denomD{};                 // mu+ B+ + mu- B-  (tangential 2x2 determinant)
  cd Eg[3]{}, Eh[3]{};         // cross-term sums feeding tangential symbols

  cd B(Side s) const { return s == Side::plus ? B_plus : B_minus; }
};

// Degeneracy floor for |det L|: a pure sanity trap (the determinant admits a
// cubic lower bound on the sector, so this never fires for valid points).
inline constexpr double kDetDegeneracyFloor = 1e-300;

SymbolTable build_symbol_table(const SpectralPoint& p, const FluidParams& fp);

// ---------------------------------------------------------------------------
// Symbol evaluation
// ---------------------------------------------------------------------------

enum class SymbolKind {
  phi_vel,      // velocity response to [[g_k]]
  psi_vel,      // velocity response to [[h_k]]
  chi_press,    // pressure response to [[g_k]]
  omega_press,  // pressure response to [[h_k]]
  M_kernel,
  exp_A,
  exp_B,
  S_u_family,
  S_theta_family,
  appendixA,
  helmholtz,
  lopatinskii_eta,
};

struct SymbolRequest {
  SymbolKind kind = SymbolKind::phi_vel;
  Side side = Side::plus;
  int j = 0;        // velocity component index, 0-based, 0..n-1
  int k = 0;        // data component index, 0-based, 0..n-1
  int m_index = 0;  // tangential index for the i xi_m weighted variants
  int deriv = 0;    // d/dx_n order, 0..3
  double x_n = 0.0; // signed; one-sided traces evaluated at x_n = 0
};

// Coefficient pair relative to the per-side basis {M_s(x), e_s(x)} with
// e_+(x) = e^{-B_+ x}, e_-(x) = e^{B_- x}.
struct CoefPair {
  cd cM{};
  cd cE{};
};

// phi_{k, s j}: velocity symbol multiplying [[g_k]] in component j, side s.
CoefPair phi_coef(const SymbolTable& t, int k, Side s, int j);
// psi_{k, s j}: same for [[h_k]].
CoefPair psi_coef(const SymbolTable& t, int k, Side s, int j);
// chi_{k, s} / omega_{k, s}: pressure symbols; the value is coef * e^{-+ A x}.
cd chi_coef(const SymbolTable& t, int k, Side s);
cd omega_coef(const SymbolTable& t, int k, Side s);

// Basis functions and d/dx_n derivatives (orders 0..3) at one vertical point.
struct Basis {
  cd M[4]{};   // M_s and derivatives
  cd E[4]{};   // e_s and derivatives
  cd eA[4]{};  // e^{-+ A x} and derivatives
};
Basis eval_basis(const SymbolTable& t, Side s, double x_n);

inline cd eval_pair(const CoefPair& c, const Basis& b, int order) {
  return c.cM * b.M[order] + c.cE * b.E[order];
}

// Spec'd entry points (thin wrappers around the coefficient API).
cd velocity_symbol(const SymbolRequest& req, const SymbolTable& t);
cd pressure_symbol(const SymbolRequest& req, const SymbolTable& t);

// Weighted S-family members from the solution-formula decomposition.
// kind: S_u_family uses (phi, psi); S_theta_family uses (chi, omega).
//   variant 1: rho/mu lambda^{1/2} B^{-2} d_n(phi|chi)
//   variant 2: i xi_m B^{-2} d_n(phi|chi)
//   variant 3: (phi|chi)
//   variant 4: B^{-2} d_n(psi|omega)
//   variant 5: rho/mu lambda^{1/2} B^{-2} (psi|omega)   [theta family: k != n]
//   variant 6: i xi_m B^{-2} (psi|omega)
// req.deriv applies d/dx_n on top of the variant's own derivative.
cd s_family_symbol(SymbolKind kind, int variant, const SymbolRequest& req,
                   const SymbolTable& t);

// Whole-space Helmholtz multipliers at a full frequency xi (n components):
// velocity matrix P(xi)/(rho lambda + mu |xi|^2) and pressure vector
// -i xi / |xi|^2, everything complexified through |xi|^2 := sum xi_j^2.
void helmholtz_symbol(const cd* xi_full, int n, cd lambda, const FluidParams& fp,
                      Side side, cd mat[3][3], cd vec[3]);

// Normal-component multipliers (lambda in place of |lambda| so the certifier
// can sweep the complexified version; modulus is taken in bound reports):
//   k < n:  lambda (i xi_n / A) (rho lambda + mu |xi|^2)^{-1} (-xi_n xi_k / |xi|^2)
//   k = n:  lambda (i xi_n / A) (rho lambda + mu |xi|^2)^{-1} (A^2 / |xi|^2)
// with A = sqrt(sum_{j<n} xi_j^2) and |xi|^2 = A^2 + xi_n^2.
cd appendixA_symbol(const cd* xi_full, int n, cd lambda, const FluidParams& fp,
                    int k, Side side);

}  // namespace stokes2p
