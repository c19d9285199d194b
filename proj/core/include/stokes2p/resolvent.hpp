// resolvent.hpp -- grid-level resolvent solves.
//
// Discretization: tangential torus (periods 2 pi L_d, N_d modes) crossed with
// a symmetric vertical extent [-X, X].  Interface data live per tangential
// mode; interior forces are finite vertical Fourier sums on [-X, X) so the
// whole-space (Helmholtz) reduction is exact for periodized data.  Solutions
// are stored as per-mode coefficient bundles and evaluated analytically in
// x_n at the vertical nodes -- there is no discrete ODE solve; the
// independent check is the physical-space finite-difference oracle in
// residual_report.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stokes2p/boundary.hpp"
#include "stokes2p/symbols.hpp"
#include "stokes2p/types.hpp"

namespace stokes2p {

struct GridSpec {
  int n = 3;              // space dimension, 2 or 3
  int modes[2] = {8, 8};  // tangential points per direction (even); first n-1 used
  double L[2] = {1.0, 1.0};  // tangential periods are 2 pi L_d
  int n_vertical = 32;    // vertical nodes per half (excluding the 0 traces)
  double X = 8.0;         // vertical half-extent
  double zmin_factor = 0.1;       // first node near zmin_factor * X / n_vertical
  bool uniform_vertical = false;  // uniform staggered nodes instead of geometric
  int n_vert_modes = 32;  // vertical modes of the periodized interior force (even)

  int m1() const { return modes[0]; }
  int m2() const { return n == 3 ? modes[1] : 1; }
  std::size_t mode_count() const {
    return static_cast<std::size_t>(m1()) * static_cast<std::size_t>(m2());
  }
  std::size_t mode_index(int k1, int k2) const {
    return static_cast<std::size_t>(k1) * m2() + static_cast<std::size_t>(k2);
  }
  // DFT index -> signed integer frequency (k <= M/2 maps up, else k - M).
  static int signed_index(int k, int M) { return k < (M + 1) / 2 ? k : k - M; }
  // Tangential frequency vector of a mode (xi_d = signed k_d / L_d).
  void mode_freq(std::size_t idx, double xi[2]) const;
  bool is_zero_mode(std::size_t idx) const;
  // Vertical frequency of the periodized force: pi * signed kv / X.
  double vert_freq(int kv) const;
  // Positive vertical nodes, ascending, excluding 0 (trace stored separately).
  std::vector<double> vertical_nodes() const;
  // Trapezoid weights for {0} u nodes; w_trace pairs with the x_n = 0 trace.
  void vertical_weights(const std::vector<double>& nodes, double& w_trace,
                        std::vector<double>& w) const;
  void validate() const;
};

// Interface data in tangential-Fourier representation (coefficients of
// e^{i xi' . x'}); g and h are the stress/velocity jumps, d the kinematic
// datum.  The zero tangential mode is filtered on construction.
struct InterfaceData {
  std::vector<cd> g[3];
  std::vector<cd> h[3];
  std::vector<cd> d;
  bool zero_mode_filtered = false;  // true when filtering dropped content
};

InterfaceData make_interface_data(const GridSpec& grid);
void filter_zero_mode(const GridSpec& grid, InterfaceData& data);

// Interior force as vertical Fourier coefficients per tangential mode:
// f_j(x) = sum_kv fhat_j[mode, kv] e^{i xi'.x'} e^{i pi kv_signed x_n / X}.
struct InteriorForce {
  std::vector<cd> f[3];  // size mode_count * n_vert_modes, kv fastest
  bool zero() const {
    for (const auto& c : f)
      for (const cd& v : c)
        if (v != cd{}) return false;
    return true;
  }
};

InteriorForce make_interior_force(const GridSpec& grid);
cd& force_at(const GridSpec& grid, InteriorForce& f, int component, std::size_t mode,
             int kv);

// Whole-space part: per-phase velocity potential psi and the shared pressure
// potential phi, as vertical Fourier coefficients per tangential mode.
struct HelmholtzSolution {
  cd lambda{};
  int n_vert = 0;
  std::vector<cd> psi[2][3];  // [side][component][mode * n_vert + kv]
  std::vector<cd> phi;        // [mode * n_vert + kv]
  std::vector<unsigned char> mode_active;

  // Adds the whole-space contribution (velocity psi, pressure phi and
  // x_n-derivatives) into `out` at signed height x.
  void accumulate_mode(const GridSpec& grid, std::size_t mode, Side side, double x,
                       ModeEval& out) const;
};

HelmholtzSolution helmholtz_solve(const GridSpec& grid, const InteriorForce& f,
                                  cd lambda, const FluidParams& fp);

// Full solution: boundary/surface-driven per-mode coefficient bundles plus
// the optional whole-space part.  theta_offset is a debug probe adding a
// constant to the pressure of one phase (affine-sensitivity checks).
struct TwoPhaseField {
  GridSpec grid;
  cd lambda{};
  FluidParams fp{};
  bool has_surface = false;

  struct ModeSlot {
    bool active = false;
    ModeSolution sol;
  };
  std::vector<ModeSlot> modes;
  std::vector<cd> eta;  // per mode; empty unless has_surface
  std::optional<HelmholtzSolution> hh;
  cd theta_offset[2]{};

  bool mode_active(std::size_t mode) const;
  // Total per-mode evaluation (boundary + whole-space parts) at signed x.
  ModeEval eval_mode(std::size_t mode, Side side, double x) const;
  ModeEval trace(std::size_t mode, Side side) const { return eval_mode(mode, side, 0.0); }
};

TwoPhaseField boundary_solve(const GridSpec& grid, const InterfaceData& data,
                             cd lambda, const FluidParams& fp);
TwoPhaseField solve_rswithout(const GridSpec& grid, const InteriorForce& f,
                              const InterfaceData& data, cd lambda,
                              const FluidParams& fp);
// d_tilde given per tangential mode; returns eta plus the surface correction
// velocity/pressure (w, kappa).
TwoPhaseField surface_solve(const GridSpec& grid, const std::vector<cd>& d_tilde,
                            cd lambda, const FluidParams& fp);
TwoPhaseField solve_rswith(const GridSpec& grid, const InteriorForce& f,
                           const InterfaceData& data, cd lambda,
                           const FluidParams& fp);

// Residual norms, twice: per-mode analytic derivatives (spectral oracle) and
// physical-space central differences in x_n on the vertical grid
// (independent oracle).  Sup norms over modes/nodes unless noted.
struct ResidualReport {
  double momentum = 0.0;       // rho lambda u - Div S(u, theta) - f, spectral
  double divergence = 0.0;
  double stress_jump = 0.0;    // includes the eta weight on surface solves
  double velocity_jump = 0.0;
  double kinematic = 0.0;      // lambda eta + u_n(0+) - d, surface solves
  double momentum_fd = 0.0;    // FD-in-x_n oracle, sup over interior nodes
  double momentum_fd_l2 = 0.0; // same, discrete L2 over the grid
  double decay_envelope = 0.0; // boundary part: |u(+-X)| / (e^{-Re min(A,B) X/2} |u(0+-)|)
};

ResidualReport residual_report(const TwoPhaseField& field, const InteriorForce* f,
                               const InterfaceData* data);

// Resolvent-estimate ratio.  LHS bundles (|lambda| u, |lambda|^{1/2} grad u,
// grad^2 u, grad theta) plus the eta norms on surface solves; RHS bundles
// (f, |lambda|^{1/2} g, grad g, |lambda| h, grad^2 h,
//  |lambda| |grad'|^{-1} d_n h_n) plus ||d||_{W^2_q}.  Jump data are lifted
// to bulk fields with the canonical e^{-A~ |x_n|} extension per mode; eta and
// d norms are taken on the interface (tangential Sobolev scale).  q = 2 uses
// Parseval; general q samples physical space on the grid.
struct RatioReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;   // 0 when both sides vanish
  // LHS pieces
  double lam_u = 0.0, sqlam_grad_u = 0.0, grad2_u = 0.0, grad_theta = 0.0;
  double eta_w2 = 0.0, eta_w3 = 0.0;  // |lambda| ||eta||_{W^2_q}, ||eta||_{W^3_q}
  // RHS pieces
  double f_norm = 0.0, g_terms = 0.0, h_terms = 0.0, d_w2 = 0.0;
  // Extra eta ratios reported separately (their RHS carries extra d terms)
  double eta_w1_ratio = 0.0;  // |lambda|^{3/2} ||eta||_{W^1_q} / (RHS + |lambda|^{1/2}||d||_{W^1_q})
  double eta_l0_ratio = 0.0;  // |lambda|^2 ||eta||_{L_q} / (RHS + |lambda| ||d||_{L_q})
  // raw interface norms without lambda multipliers (for contour aggregation)
  double eta_w1_raw = 0.0, eta_l0_raw = 0.0, d_w1_raw = 0.0, d_l0_raw = 0.0;
  bool inconsistent = false;  // RHS = 0 with LHS != 0
};

RatioReport norms_and_ratio(const TwoPhaseField& field, const InteriorForce* f,
                            const InterfaceData* data, int q);

// phys(p) = sum_k modes(k) e^{i k . x_p} on the tangential torus (plain
// Fourier-sum convention, no 1/N).
void tangential_ifft(const GridSpec& g, const std::vector<cd>& modes,
                     std::vector<cd>& phys);

}  // namespace stokes2p
