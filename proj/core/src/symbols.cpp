// symbols.cpp -- closed-form symbol engine (see symbols.hpp for conventions).

#include "stokes2p/symbols.hpp"

#include <cmath>
#include <stdexcept>

namespace stokes2p {

cd sqrt_positive_real(cd z) {
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw std::domain_error("sqrt_positive_real: argument on the branch cut (-inf, 0]");
  // Principal branch has Re >= 0 with equality only on the cut, which is
  // excluded above.
  return std::sqrt(z);
}

Roots compute_roots(const SpectralPoint& p, const FluidParams& fp) {
  Roots r;
  cd sum2{};
  double abs2 = 0.0;
  for (int j = 0; j < p.nxi(); ++j) {
    sum2 += p.xi[j] * p.xi[j];
    abs2 += std::norm(p.xi[j]);
  }
  r.A = sqrt_positive_real(sum2);
  r.A_tilde = std::sqrt(abs2);
  r.B_plus = sqrt_positive_real(fp.rho_plus / fp.mu_plus * p.lambda + r.A * r.A);
  r.B_minus = sqrt_positive_real(fp.rho_minus / fp.mu_minus * p.lambda + r.A * r.A);
  return r;
}

namespace {

// phi1(z) = (e^z - 1)/z, cancellation-free near 0.
cd phi1(cd z) {
  if (std::abs(z) < 1e-3)
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
  return (std::exp(z) - 1.0) / z;
}

}  // namespace

cd m_kernel(cd A, cd B, double x_n, Side side, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("m_kernel: order must be 0..3");
  if (sign_of(side) * x_n < 0.0)
    throw std::invalid_argument("m_kernel: x_n has the wrong sign for the side");
  // Factored form: M_+ = -x e^{-A x} phi1(-(B-A)x),  M_- = x e^{A x} phi1((B-A)x).
  cd M, E;
  if (side == Side::plus) {
    M = -x_n * std::exp(-A * x_n) * phi1(-(B - A) * x_n);
    E = std::exp(-B * x_n);
  } else {
    M = x_n * std::exp(A * x_n) * phi1((B - A) * x_n);
    E = std::exp(B * x_n);
  }
  switch (order) {
    case 0: return M;
    case 1: return side == Side::plus ? -E - A * M : E + A * M;
    case 2: return (A + B) * E + A * A * M;
    case 3:
      return side == Side::plus ? -(A * A + A * B + B * B) * E - A * A * A * M
                                : (A * A + A * B + B * B) * E + A * A * A * M;
  }
  return {};
}

namespace {

// 3x3 determinant helper for the explicit adjugate.
cd det3(cd a00, cd a01, cd a02, cd a10, cd a11, cd a12, cd a20, cd a21, cd a22) {
  return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
         a02 * (a10 * a21 - a11 * a20);
}

}  // namespace

SymbolTable build_symbol_table(const SpectralPoint& p, const FluidParams& fp) {
  fp.validate();
  if (p.dim != 2 && p.dim != 3)
    throw std::invalid_argument("build_symbol_table: dim must be 2 or 3");

  SymbolTable t;
  t.n = p.dim;
  t.lambda = p.lambda;
  t.xi = p.xi;
  t.fp = fp;

  const Roots r = compute_roots(p, fp);
  t.A = r.A;
  t.B_plus = r.B_plus;
  t.B_minus = r.B_minus;
  t.A_tilde = r.A_tilde;
  t.sqrt_lambda = sqrt_positive_real(p.lambda);

  const double mp = fp.mu_plus, mm = fp.mu_minus;
  const cd A = t.A, Bp = t.B_plus, Bm = t.B_minus;

  // Boundary system rows: normal stress, tangential stress combination,
  // velocity continuity, and the beta-difference row.
  const cd L[4][4] = {
      {mp * (Bp + A), mp * (Bp * Bp + A * A), -mm * (Bm + A), -mm * (Bm * Bm + A * A)},
      {mp * (Bp - A), -2.0 * mp * A * Bp, mm * (Bm - A), -2.0 * mm * A * Bm},
      {1.0, Bp, 1.0, Bm},
      {0.0, 1.0, 0.0, -1.0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t.L[i][j] = L[i][j];

  // Closed-form determinant of the matrix above.
  const cd S1 = mp * Bp + mm * Bm;
  t.detL_closed = -(mp - mm) * (mp - mm) * A * A * A +
                  ((3.0 * mp - mm) * mp * Bp + (3.0 * mm - mp) * mm * Bm) * A * A +
                  (S1 * S1 + mp * mm * (Bp + Bm) * (Bp + Bm)) * A +
                  S1 * (mp * Bp * Bp + mm * Bm * Bm);

  // Adjugate via explicit 3x3 minors: cofactor[i][s] = (-1)^{i+s} minor(row s, col i),
  // so that L^{-1} = cofactor / detL.
  for (int i = 0; i < 4; ++i) {
    for (int s = 0; s < 4; ++s) {
      int rr[3], cc[3], ri = 0, ci = 0;
      for (int q = 0; q < 4; ++q) {
        if (q != s) rr[ri++] = q;
        if (q != i) cc[ci++] = q;
      }
      const cd minor = det3(L[rr[0]][cc[0]], L[rr[0]][cc[1]], L[rr[0]][cc[2]],
                            L[rr[1]][cc[0]], L[rr[1]][cc[1]], L[rr[1]][cc[2]],
                            L[rr[2]][cc[0]], L[rr[2]][cc[1]], L[rr[2]][cc[2]]);
      t.cofactor[i][s] = (((i + s) & 1) ? -1.0 : 1.0) * minor;
    }
  }

  // Direct determinant from the first adjugate column: detL = sum_s L[s][0] cof[0][s].
  t.detL_direct = L[0][0] * t.cofactor[0][0] + L[1][0] * t.cofactor[0][1] +
                  L[2][0] * t.cofactor[0][2] + L[3][0] * t.cofactor[0][3];

  if (std::abs(t.detL_direct) < kDetDegeneracyFloor)
    throw std::domain_error("build_symbol_table: Lopatinskii degeneracy (|det L| below floor)");

  // Right-hand-side map R (4 x 2n), columns [g_1..g_{n-1}, g_n, h_1..h_{n-1}, h_n]:
  //   row 0: i xi_j on the g' columns;   row 1: -A on the g_n column;
  //   row 2: i xi_j on the h' columns;   row 3: +1 on the h_n column.
  const int n = t.n;
  cd R[4][6]{};
  for (int j = 0; j < n - 1; ++j) {
    R[0][j] = cd(0, 1) * p.xi[j];
    R[2][n + j] = cd(0, 1) * p.xi[j];
  }
  R[1][n - 1] = -A;
  R[3][2 * n - 1] = 1.0;

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      cd acc{};
      for (int s = 0; s < 4; ++s) acc += t.cofactor[i][s] * R[s][j];
      t.a[i][j] = acc / t.detL_direct;
    }

  // Tangential 2x2 system pieces.
  t.denomD = mp * Bp + mm * Bm;
  for (int k = 0; k < n; ++k) {
    t.Eg[k] = mp * (t.a[0][k] + A * t.a[1][k]) - mm * (t.a[2][k] + A * t.a[3][k]);
    t.Eh[k] = mp * (t.a[0][n + k] + A * t.a[1][n + k]) - mm * (t.a[2][n + k] + A * t.a[3][n + k]);
  }

  // Lopatinskii function of the surface-coupled problem.
  t.lopatinskii = p.lambda * t.detL_direct -
                  A * (mp * (Bp + A) + mm * (Bm + A)) *
                      (fp.jump_rho() * fp.c_g - fp.c_sigma * A * A);
  return t;
}

CoefPair phi_coef(const SymbolTable& t, int k, Side s, int j) {
  const int n = t.n;
  if (k < 0 || k >= n || j < 0 || j >= n) throw std::invalid_argument("phi_coef: bad indices");
  if (t.A == cd(0.0)) throw std::domain_error("phi_coef: zero tangential frequency");
  CoefPair c;
  if (j == n - 1) {
    // Normal component: row coefficients straight from the 4x4 solve.
    if (s == Side::plus) {
      c.cM = t.a[0][k];
      c.cE = t.a[1][k];
    } else {
      c.cM = t.a[2][k];
      c.cE = t.a[3][k];
    }
    return c;
  }
  const cd ix_over_A = cd(0, 1) * t.xi[j] / t.A;
  c.cM = (s == Side::plus) ? -ix_over_A * t.a[0][k] : ix_over_A * t.a[2][k];
  c.cE = ix_over_A * t.Eg[k] / t.denomD;
  if (k == j) c.cE += 1.0 / t.denomD;  // same on both sides: [[g_j]] drives both traces
  return c;
}

CoefPair psi_coef(const SymbolTable& t, int k, Side s, int j) {
  const int n = t.n;
  if (k < 0 || k >= n || j < 0 || j >= n) throw std::invalid_argument("psi_coef: bad indices");
  if (t.A == cd(0.0)) throw std::domain_error("psi_coef: zero tangential frequency");
  CoefPair c;
  if (j == n - 1) {
    if (s == Side::plus) {
      c.cM = t.a[0][n + k];
      c.cE = t.a[1][n + k];
    } else {
      c.cM = t.a[2][n + k];
      c.cE = t.a[3][n + k];
    }
    return c;
  }
  const cd ix_over_A = cd(0, 1) * t.xi[j] / t.A;
  c.cM = (s == Side::plus) ? -ix_over_A * t.a[0][n + k] : ix_over_A * t.a[2][n + k];
  c.cE = ix_over_A * t.Eh[k] / t.denomD;
  if (k == j) {
    // Velocity jump row of the tangential 2x2 system splits asymmetrically.
    c.cE += (s == Side::plus) ? t.fp.mu_minus * t.B_minus / t.denomD
                              : -t.fp.mu_plus * t.B_plus / t.denomD;
  }
  return c;
}

cd chi_coef(const SymbolTable& t, int k, Side s) {
  if (k < 0 || k >= t.n) throw std::invalid_argument("chi_coef: bad index");
  if (t.A == cd(0.0)) throw std::domain_error("chi_coef: zero tangential frequency");
  if (s == Side::plus)
    return -(t.fp.mu_plus * (t.B_plus + t.A) / t.A) * t.a[0][k];
  return (t.fp.mu_minus * (t.B_minus + t.A) / t.A) * t.a[2][k];
}

cd omega_coef(const SymbolTable& t, int k, Side s) {
  if (k < 0 || k >= t.n) throw std::invalid_argument("omega_coef: bad index");
  if (t.A == cd(0.0)) throw std::domain_error("omega_coef: zero tangential frequency");
  if (s == Side::plus)
    return -(t.fp.mu_plus * (t.B_plus + t.A) / t.A) * t.a[0][t.n + k];
  return (t.fp.mu_minus * (t.B_minus + t.A) / t.A) * t.a[2][t.n + k];
}

Basis eval_basis(const SymbolTable& t, Side s, double x_n) {
  Basis b;
  const cd A = t.A, B = t.B(s);
  const double sg = sign_of(s);
  if (sg * x_n < 0.0) throw std::invalid_argument("eval_basis: x_n has the wrong sign for the side");
  const cd E0 = std::exp(-sg * B * x_n);
  const cd eA0 = std::exp(-sg * A * x_n);
  b.M[0] = -sg * x_n * eA0 * phi1(-sg * (B - A) * x_n);
  b.M[1] = -sg * (E0 + A * b.M[0]);
  b.M[2] = (A + B) * E0 + A * A * b.M[0];
  b.M[3] = -sg * ((A * A + A * B + B * B) * E0 + A * A * A * b.M[0]);
  cd f = 1.0;
  for (int m = 0; m < 4; ++m) {
    b.E[m] = f * E0;
    f *= -sg * B;
  }
  f = 1.0;
  for (int m = 0; m < 4; ++m) {
    b.eA[m] = f * eA0;
    f *= -sg * A;
  }
  return b;
}

cd velocity_symbol(const SymbolRequest& req, const SymbolTable& t) {
  if (req.deriv < 0 || req.deriv > 3)
    throw std::invalid_argument("velocity_symbol: deriv must be 0..3");
  const Basis b = eval_basis(t, req.side, req.x_n);
  const CoefPair c = (req.kind == SymbolKind::psi_vel) ? psi_coef(t, req.k, req.side, req.j)
                                                       : phi_coef(t, req.k, req.side, req.j);
  return eval_pair(c, b, req.deriv);
}

cd pressure_symbol(const SymbolRequest& req, const SymbolTable& t) {
  if (req.deriv < 0 || req.deriv > 3)
    throw std::invalid_argument("pressure_symbol: deriv must be 0..3");
  const Basis b = eval_basis(t, req.side, req.x_n);
  const cd c = (req.kind == SymbolKind::omega_press) ? omega_coef(t, req.k, req.side)
                                                     : chi_coef(t, req.k, req.side);
  return c * b.eA[req.deriv];
}

cd s_family_symbol(SymbolKind kind, int variant, const SymbolRequest& req,
                   const SymbolTable& t) {
  if (variant < 1 || variant > 6) throw std::invalid_argument("s_family_symbol: variant 1..6");
  const bool theta = (kind == SymbolKind::S_theta_family);
  if (!theta && kind != SymbolKind::S_u_family)
    throw std::invalid_argument("s_family_symbol: kind must be S_u_family or S_theta_family");
  if (theta && variant == 5 && req.k == t.n - 1)
    throw std::invalid_argument(
        "s_family_symbol: the unweighted normal-pressure response is excluded from variant 5 "
        "(use the A B^{-2} replacement weighting)");

  const cd B = t.B(req.side);
  const cd Binv2 = 1.0 / (B * B);
  const double rho_over_mu = t.fp.rho(req.side) / t.fp.mu(req.side);

  // base symbol derivative order and scalar prefactor per variant
  int extra = 0;
  cd pre = 1.0;
  bool second_slot = false;  // psi/omega instead of phi/chi
  switch (variant) {
    case 1: pre = rho_over_mu * t.sqrt_lambda * Binv2; extra = 1; break;
    case 2: pre = cd(0, 1) * t.xi[req.m_index] * Binv2; extra = 1; break;
    case 3: pre = 1.0; break;
    case 4: pre = Binv2; extra = 1; second_slot = true; break;
    case 5: pre = rho_over_mu * t.sqrt_lambda * Binv2; second_slot = true; break;
    case 6: pre = cd(0, 1) * t.xi[req.m_index] * Binv2; second_slot = true; break;
  }
  const int order = req.deriv + extra;
  if (order > 3) throw std::invalid_argument("s_family_symbol: combined derivative order > 3");

  const Basis b = eval_basis(t, req.side, req.x_n);
  if (theta) {
    const cd c = second_slot ? omega_coef(t, req.k, req.side) : chi_coef(t, req.k, req.side);
    return pre * c * b.eA[order];
  }
  const CoefPair c = second_slot ? psi_coef(t, req.k, req.side, req.j)
                                 : phi_coef(t, req.k, req.side, req.j);
  return pre * eval_pair(c, b, order);
}

void helmholtz_symbol(const cd* xi_full, int n, cd lambda, const FluidParams& fp,
                      Side side, cd mat[3][3], cd vec[3]) {
  cd norm2{};
  for (int j = 0; j < n; ++j) norm2 += xi_full[j] * xi_full[j];
  if (norm2 == cd(0.0)) throw std::domain_error("helmholtz_symbol: zero frequency");
  const cd denom = fp.rho(side) * lambda + fp.mu(side) * norm2;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const cd P = (j == k ? cd(1.0) : cd(0.0)) - xi_full[j] * xi_full[k] / norm2;
      mat[j][k] = P / denom;
    }
    vec[j] = -cd(0, 1) * xi_full[j] / norm2;
  }
}

cd appendixA_symbol(const cd* xi_full, int n, cd lambda, const FluidParams& fp,
                    int k, Side side) {
  cd A2{};
  for (int j = 0; j < n - 1; ++j) A2 += xi_full[j] * xi_full[j];
  if (A2 == cd(0.0)) throw std::domain_error("appendixA_symbol: zero tangential frequency");
  const cd A = sqrt_positive_real(A2);
  const cd xin = xi_full[n - 1];
  const cd norm2 = A2 + xin * xin;
  if (norm2 == cd(0.0)) throw std::domain_error("appendixA_symbol: zero full frequency");
  const cd denom = fp.rho(side) * lambda + fp.mu(side) * norm2;
  const cd common = lambda * (cd(0, 1) * xin / A) / denom;
  if (k < 0 || k >= n) throw std::invalid_argument("appendixA_symbol: bad k");
  if (k == n - 1) return common * (A2 / norm2);
  return common * (-xin * xi_full[k] / norm2);
}

}  // namespace stokes2p
