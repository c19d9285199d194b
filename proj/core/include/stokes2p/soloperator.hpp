// soloperator.hpp -- y_n-integral operators on the half space.
//
// The solution-formula route expresses the boundary part of the resolvent as
//   T[m] f(x', x_n) = Int_0^infty [F^{-1} m(xi', x_n + y_n) F f](x', y_n) dy_n
// applied to the jump extension [[f]](x', x_n) = f(x', x_n) - f(x', -x_n).
// This module implements the extension calculus, the per-mode quadrature
// operator and empirical L_q bound estimation over seeded band-limited
// ensembles, including the control kernel (x_n + y_n)^{-1} that violates the
// tangential-decay condition.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stokes2p/grids.hpp"
#include "stokes2p/resolvent.hpp"
#include "stokes2p/symbols.hpp"

namespace stokes2p {

// Tangential torus (from GridSpec) times a graded positive vertical grid with
// trapezoid weights; the [0, y_0] sliver is folded into the first node.
struct HalfGrid {
  GridSpec grid;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return grid.mode_count() * nodes.size(); }
  std::size_t at(std::size_t mode, std::size_t i) const {
    return mode * nodes.size() + i;
  }
};

// level doubles the vertical resolution level times (refinement studies).
HalfGrid make_half_grid(const GridSpec& g, int level = 0);

struct HalfSpaceFunction {
  std::vector<cd> v;  // [mode * nodes + i]
};

HalfSpaceFunction zero_function(const HalfGrid& hg);

// A two-phase sampler: value of one scalar component at (mode, signed x_n).
using TwoPhaseSampler = std::function<cd(std::size_t mode, double x)>;

// [[f]](x', x_n) = f(x', x_n) - f(x', -x_n) sampled on the half grid.
HalfSpaceFunction jjump_extend(const HalfGrid& hg, const TwoPhaseSampler& f);
// component 0..n-1: velocity; component n: pressure.
HalfSpaceFunction jjump_extend(const HalfGrid& hg, const TwoPhaseField& f,
                               int component);

// Grid L_q norms (Parseval for q = 2, physical transform otherwise).
double lq_norm(const HalfGrid& hg, const HalfSpaceFunction& f, int q);
// Same norm over both halves of a two-phase sampler (for the extension
// inequality ||[[f]]||_{L_q(+)} <= 2^{1 - 1/q} ||f||_{L_q(both)}).
double lq_norm_two_phase(const HalfGrid& hg, const TwoPhaseSampler& f, int q);

// Kernel m(xi'_mode, s) evaluated at accumulated depth s = x_n + y_n > 0.
using ModeKernel = std::function<cd(std::size_t mode, double s)>;

// (T[m] f)(mode, x_i) = sum_j w_j m(mode, x_i + y_j) f(mode, y_j).
HalfSpaceFunction apply_T(const HalfGrid& hg, const ModeKernel& m,
                          const HalfSpaceFunction& f);

// Max of ||T[m] f||_q / ||f||_q over a seeded band-limited random ensemble.
// Members populate tangential modes with |signed index| <= band (zero mode
// excluded) and smooth decaying vertical profiles.
double empirical_bound(const HalfGrid& hg, const ModeKernel& m, int q,
                       int ensemble_size, std::uint64_t seed, int threads = 1);

// e^{-A~ (x+y)} per mode (A~ from the mode frequency); zero at the zero mode.
ModeKernel make_exp_kernel(const HalfGrid& hg);
// Control kernel (x + y)^{-1}: no tangential decay (condition (a) fails).
ModeKernel make_negative_control();
// Certified S-family member as a kernel in the accumulated depth; the symbol
// tables per mode are precomputed.  j/k/m_index as in SymbolRequest.
ModeKernel make_sfamily_kernel(const HalfGrid& hg, cd lambda, const FluidParams& fp,
                               SymbolKind kind, int variant, int j, int k,
                               int m_index);

// Solution-formula route for one mode of pure boundary data whose vertical
// profiles are one-sided exponentials:
//   a_k(y) = up_k e^{-c_up y} (y > 0),  a_k(y) = dn_k e^{c_dn y} (y < 0),
// so [[a_k]](0) = up_k - dn_k.  The route integrates
//   u_{+j}(x) = -sum_k Int_0^infty [ d phi_{k,+j}(x+y) Ja_k(y)
//                                    + phi_{k,+j}(x+y) Ja'_k(y) + (psi terms) ] dy
// with Ja(y) = a(y) - a(-y) and Ja'(y) = a'(y) + a'(-y) (derivative of the
// extension), which telescopes to the trace-form solution.
struct Sol1Profiles {
  std::array<cd, 3> g_up{}, g_dn{};
  std::array<cd, 3> h_up{}, h_dn{};
  double c_up = 1.0, c_dn = 1.0;
};

cd sol1_velocity(const SymbolTable& t, const Sol1Profiles& pr, int j, double x,
                 const PanelQuadrature& quad);

}  // namespace stokes2p
