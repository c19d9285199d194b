// resolvent.cpp -- grid-level solves, residual oracles and norm ratios.

#include "stokes2p/resolvent.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stokes2p {

namespace {
constexpr cd kI{0.0, 1.0};
}  // namespace

// phys(p) = sum_k modes(k) e^{+i k . x_p}; Eigen's inv carries 1/N, so scale
// back to the plain Fourier-sum convention used for mode coefficients.
void tangential_ifft(const GridSpec& g, const std::vector<cd>& modes,
                     std::vector<cd>& phys) {
  const int M1 = g.m1(), M2 = g.m2();
  phys.assign(modes.begin(), modes.end());
  Eigen::FFT<double> fft;
  std::vector<cd> line(static_cast<std::size_t>(std::max(M1, M2)));
  std::vector<cd> out(line.size());
  if (M2 > 1) {
    line.resize(static_cast<std::size_t>(M2));
    out.resize(line.size());
    for (int k1 = 0; k1 < M1; ++k1) {
      std::copy_n(phys.begin() + static_cast<std::ptrdiff_t>(k1) * M2, M2, line.begin());
      fft.inv(out, line);
      for (int p = 0; p < M2; ++p)
        phys[static_cast<std::size_t>(k1) * M2 + p] = out[static_cast<std::size_t>(p)] *
                                                      static_cast<double>(M2);
    }
  }
  line.resize(static_cast<std::size_t>(M1));
  out.resize(line.size());
  for (int p2 = 0; p2 < M2; ++p2) {
    for (int k1 = 0; k1 < M1; ++k1)
      line[static_cast<std::size_t>(k1)] = phys[static_cast<std::size_t>(k1) * M2 + p2];
    fft.inv(out, line);
    for (int p1 = 0; p1 < M1; ++p1)
      phys[static_cast<std::size_t>(p1) * M2 + p2] =
          out[static_cast<std::size_t>(p1)] * static_cast<double>(M1);
  }
}

namespace {

// e^{i omega_kv z} tables for evaluating vertical Fourier sums at the nodes.
struct VertExpTable {
  int nv = 0;
  std::vector<cd> e;  // [node_slot * nv + kv]
  std::vector<double> omega;

  VertExpTable(const GridSpec& g, const std::vector<double>& zs) : nv(g.n_vert_modes) {
    omega.resize(static_cast<std::size_t>(nv));
    for (int kv = 0; kv < nv; ++kv) omega[static_cast<std::size_t>(kv)] = g.vert_freq(kv);
    e.resize(zs.size() * static_cast<std::size_t>(nv));
    for (std::size_t i = 0; i < zs.size(); ++i)
      for (int kv = 0; kv < nv; ++kv)
        e[i * nv + kv] = std::exp(kI * omega[static_cast<std::size_t>(kv)] * zs[i]);
  }
};

cd force_value(const GridSpec& g, const InteriorForce& f, int j, std::size_t mode,
               const VertExpTable& tab, std::size_t slot) {
  const std::size_t base = mode * static_cast<std::size_t>(g.n_vert_modes);
  cd acc{};
  for (int kv = 0; kv < g.n_vert_modes; ++kv)
    acc += f.f[j][base + static_cast<std::size_t>(kv)] *
           tab.e[slot * static_cast<std::size_t>(g.n_vert_modes) + static_cast<std::size_t>(kv)];
  return acc;
}

bool data_mode_zero(const InterfaceData& d, int n, std::size_t m) {
  for (int j = 0; j < n; ++j)
    if (d.g[j][m] != cd{} || d.h[j][m] != cd{}) return false;
  return true;
}

// Nonuniform 3-point central differences (exactly the uniform stencil when
// spacings agree).
cd fd_first(cd fm, cd f0, cd fp, double hm, double hp) {
  // weighted combination with O(h^2) error on smoothly graded grids
  return (fp * (hm * hm) - fm * (hp * hp) + f0 * (hp * hp - hm * hm)) /
         (hm * hp * (hm + hp));
}
cd fd_second(cd fm, cd f0, cd fp, double hm, double hp) {
  return 2.0 * (fm * hp - f0 * (hm + hp) + fp * hm) / (hm * hp * (hm + hp));
}

double abs2(cd z) { return std::norm(z); }

}  // namespace

// ---------------------------------------------------------------------------
// GridSpec
// ---------------------------------------------------------------------------

void GridSpec::mode_freq(std::size_t idx, double xi[2]) const {
  const int k2 = static_cast<int>(idx % static_cast<std::size_t>(m2()));
  const int k1 = static_cast<int>(idx / static_cast<std::size_t>(m2()));
  xi[0] = signed_index(k1, m1()) / L[0];
  xi[1] = n == 3 ? signed_index(k2, m2()) / L[1] : 0.0;
}

bool GridSpec::is_zero_mode(std::size_t idx) const { return idx == 0; }

double GridSpec::vert_freq(int kv) const {
  return pi * signed_index(kv, n_vert_modes) / X;
}

std::vector<double> GridSpec::vertical_nodes() const {
  std::vector<double> z(static_cast<std::size_t>(n_vertical));
  if (uniform_vertical) {
    const double h = X / n_vertical;
    for (int i = 0; i < n_vertical; ++i)
      z[static_cast<std::size_t>(i)] = (i + 0.5) * h;
    return z;
  }
  const double z0 = zmin_factor * X / n_vertical;
  const double r = std::pow(X / z0, 1.0 / (n_vertical - 1));
  double v = z0;
  for (int i = 0; i < n_vertical; ++i, v *= r) z[static_cast<std::size_t>(i)] = v;
  z.back() = X;  // guard rounding
  return z;
}

void GridSpec::vertical_weights(const std::vector<double>& nodes, double& w_trace,
                                std::vector<double>& w) const {
  const std::size_t m = nodes.size();
  w.assign(m, 0.0);
  w_trace = 0.5 * nodes[0];
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = i == 0 ? 0.0 : nodes[i - 1];
    const double hi = i + 1 < m ? nodes[i + 1] : nodes[i];
    w[i] = 0.5 * (hi - lo);
  }
}

void GridSpec::validate() const {
  if (n != 2 && n != 3) throw std::invalid_argument("GridSpec: n must be 2 or 3");
  for (int d = 0; d < n - 1; ++d) {
    if (modes[d] < 2 || modes[d] % 2 != 0)
      throw std::invalid_argument("GridSpec: tangential mode counts must be even >= 2");
    if (!(L[d] > 0.0)) throw std::invalid_argument("GridSpec: periods must be positive");
  }
  if (n_vertical < 4)
    throw std::invalid_argument("GridSpec: need at least 4 vertical nodes per half");
  if (!(X > 0.0)) throw std::invalid_argument("GridSpec: X must be positive");
  if (!(zmin_factor > 0.0) || zmin_factor > 1.0)
    throw std::invalid_argument("GridSpec: zmin_factor must lie in (0, 1]");
  if (n_vert_modes < 2 || n_vert_modes % 2 != 0)
    throw std::invalid_argument("GridSpec: n_vert_modes must be even >= 2");
}

// ---------------------------------------------------------------------------
// Data containers
// ---------------------------------------------------------------------------

InterfaceData make_interface_data(const GridSpec& grid) {
  InterfaceData d;
  const std::size_t m = grid.mode_count();
  for (int j = 0; j < grid.n; ++j) {
    d.g[j].assign(m, cd{});
    d.h[j].assign(m, cd{});
  }
  d.d.assign(m, cd{});
  return d;
}

void filter_zero_mode(const GridSpec& grid, InterfaceData& data) {
  bool dropped = false;
  for (int j = 0; j < grid.n; ++j) {
    if (data.g[j][0] != cd{} || data.h[j][0] != cd{}) dropped = true;
    data.g[j][0] = data.h[j][0] = cd{};
  }
  if (data.d[0] != cd{}) dropped = true;
  data.d[0] = cd{};
  data.zero_mode_filtered = data.zero_mode_filtered || dropped;
}

InteriorForce make_interior_force(const GridSpec& grid) {
  InteriorForce f;
  const std::size_t total = grid.mode_count() * static_cast<std::size_t>(grid.n_vert_modes);
  for (int j = 0; j < grid.n; ++j) f.f[j].assign(total, cd{});
  return f;
}

cd& force_at(const GridSpec& grid, InteriorForce& f, int component, std::size_t mode,
             int kv) {
  return f.f[component][mode * static_cast<std::size_t>(grid.n_vert_modes) +
                        static_cast<std::size_t>(kv)];
}

// ---------------------------------------------------------------------------
// Helmholtz (whole-space) solve
// ---------------------------------------------------------------------------

HelmholtzSolution helmholtz_solve(const GridSpec& grid, const InteriorForce& f,
                                  cd lambda, const FluidParams& fp) {
  grid.validate();
  HelmholtzSolution hs;
  hs.lambda = lambda;
  hs.n_vert = grid.n_vert_modes;
  const std::size_t m_count = grid.mode_count();
  const std::size_t total = m_count * static_cast<std::size_t>(hs.n_vert);
  for (int s = 0; s < 2; ++s)
    for (int j = 0; j < 3; ++j) hs.psi[s][j].assign(total, cd{});
  hs.phi.assign(total, cd{});
  hs.mode_active.assign(m_count, 0);

  const int n = grid.n;
  for (std::size_t m = 0; m < m_count; ++m) {
    double xit[2];
    grid.mode_freq(m, xit);
    for (int kv = 0; kv < hs.n_vert; ++kv) {
      const std::size_t at = m * static_cast<std::size_t>(hs.n_vert) +
                             static_cast<std::size_t>(kv);
      cd fv[3]{};
      bool nonzero = false;
      for (int j = 0; j < n; ++j) {
        fv[j] = f.f[j][at];
        nonzero = nonzero || fv[j] != cd{};
      }
      if (!nonzero) continue;

      cd xi_full[3]{};
      for (int d = 0; d < n - 1; ++d) xi_full[d] = xit[d];
      xi_full[n - 1] = grid.vert_freq(kv);
      cd xi2{};
      for (int j = 0; j < n; ++j) xi2 += xi_full[j] * xi_full[j];
      if (xi2 == cd{}) continue;  // zero full-space mode: filtered

      hs.mode_active[m] = 1;
      cd xdotf{};
      for (int j = 0; j < n; ++j) xdotf += xi_full[j] * fv[j];
      hs.phi[at] = -kI * xdotf / xi2;
      for (Side side : {Side::plus, Side::minus}) {
        const cd den = fp.rho(side) * lambda + fp.mu(side) * xi2;
        const int si = side == Side::plus ? 0 : 1;
        for (int j = 0; j < n; ++j)
          hs.psi[si][j][at] = (fv[j] - xi_full[j] * xdotf / xi2) / den;
      }
    }
  }
  return hs;
}

void HelmholtzSolution::accumulate_mode(const GridSpec& grid, std::size_t mode,
                                        Side side, double x, ModeEval& out) const {
  if (!mode_active[mode]) return;
  const int si = side == Side::plus ? 0 : 1;
  const int n = grid.n;
  const std::size_t base = mode * static_cast<std::size_t>(n_vert);
  for (int kv = 0; kv < n_vert; ++kv) {
    const cd iw = kI * grid.vert_freq(kv);
    const cd e0 = std::exp(iw * x);
    const cd e1 = iw * e0, e2 = iw * e1, e3 = iw * e2;
    const cd ph = phi[base + static_cast<std::size_t>(kv)];
    out.theta += ph * e0;
    out.dtheta += ph * e1;
    for (int j = 0; j < n; ++j) {
      const cd c = psi[si][j][base + static_cast<std::size_t>(kv)];
      if (c == cd{}) continue;
      out.u[j] += c * e0;
      out.du[j] += c * e1;
      out.d2u[j] += c * e2;
      out.d3u[j] += c * e3;
    }
  }
}

// ---------------------------------------------------------------------------
// Field assembly
// ---------------------------------------------------------------------------

bool TwoPhaseField::mode_active(std::size_t mode) const {
  if (modes[mode].active) return true;
  return hh && hh->mode_active[mode];
}

ModeEval TwoPhaseField::eval_mode(std::size_t mode, Side side, double x) const {
  ModeEval e;
  if (modes[mode].active) e = modes[mode].sol.eval(side, x);
  if (hh) hh->accumulate_mode(grid, mode, side, x, e);
  if (grid.is_zero_mode(mode))
    e.theta += theta_offset[side == Side::plus ? 0 : 1];
  return e;
}

TwoPhaseField boundary_solve(const GridSpec& grid, const InterfaceData& data,
                             cd lambda, const FluidParams& fp) {
  grid.validate();
  fp.validate();
  TwoPhaseField out;
  out.grid = grid;
  out.lambda = lambda;
  out.fp = fp;
  out.modes.resize(grid.mode_count());
  const int n = grid.n;
  for (std::size_t m = 1; m < grid.mode_count(); ++m) {
    if (data_mode_zero(data, n, m)) continue;
    SpectralPoint pt;
    pt.dim = n;
    pt.lambda = lambda;
    double xit[2];
    grid.mode_freq(m, xit);
    for (int d = 0; d < n - 1; ++d) pt.xi[static_cast<std::size_t>(d)] = xit[d];
    ModeJumps jumps;
    for (int j = 0; j < n; ++j) {
      jumps.g[j] = data.g[j][m];
      jumps.h[j] = data.h[j][m];
    }
    out.modes[m].sol = boundary_solve_mode(build_symbol_table(pt, fp), jumps);
    out.modes[m].active = true;
  }
  return out;
}

TwoPhaseField solve_rswithout(const GridSpec& grid, const InteriorForce& f,
                              const InterfaceData& data, cd lambda,
                              const FluidParams& fp) {
  HelmholtzSolution hs = helmholtz_solve(grid, f, lambda, fp);

  // Tilde data: subtract the whole-space traces so the boundary part repairs
  // the interface rows:  [[g~]] = [[g]] - [[mu D(psi) nu]],  [[h~]] = [[h]] - [[psi]].
  InterfaceData tilde = data;
  const int n = grid.n;
  for (std::size_t m = 0; m < grid.mode_count(); ++m) {
    if (!hs.mode_active[m]) continue;
    double xit[2];
    grid.mode_freq(m, xit);
    ModeEval tp, tm;
    hs.accumulate_mode(grid, m, Side::plus, 0.0, tp);
    hs.accumulate_mode(grid, m, Side::minus, 0.0, tm);
    // (D(psi) nu)_j = -(i xi_j psi_n + d_n psi_j), (D(psi) nu)_n = -2 d_n psi_n
    for (int j = 0; j < n; ++j) {
      cd dnu_p, dnu_m;
      if (j < n - 1) {
        dnu_p = -(kI * xit[j] * tp.u[n - 1] + tp.du[j]);
        dnu_m = -(kI * xit[j] * tm.u[n - 1] + tm.du[j]);
      } else {
        dnu_p = -2.0 * tp.du[n - 1];
        dnu_m = -2.0 * tm.du[n - 1];
      }
      tilde.g[j][m] -= fp.mu_plus * dnu_p - fp.mu_minus * dnu_m;
      tilde.h[j][m] -= tp.u[j] - tm.u[j];
    }
  }
  filter_zero_mode(grid, tilde);

  TwoPhaseField out = boundary_solve(grid, tilde, lambda, fp);
  if (!f.zero()) out.hh = std::move(hs);
  return out;
}

TwoPhaseField surface_solve(const GridSpec& grid, const std::vector<cd>& d_tilde,
                            cd lambda, const FluidParams& fp) {
  grid.validate();
  fp.validate();
  TwoPhaseField out;
  out.grid = grid;
  out.lambda = lambda;
  out.fp = fp;
  out.has_surface = true;
  out.modes.resize(grid.mode_count());
  out.eta.assign(grid.mode_count(), cd{});
  const int n = grid.n;
  for (std::size_t m = 1; m < grid.mode_count(); ++m) {
    if (d_tilde[m] == cd{}) continue;
    SpectralPoint pt;
    pt.dim = n;
    pt.lambda = lambda;
    double xit[2];
    grid.mode_freq(m, xit);
    for (int d = 0; d < n - 1; ++d) pt.xi[static_cast<std::size_t>(d)] = xit[d];
    const SurfaceSolution ss =
        surface_solve_mode(build_symbol_table(pt, fp), d_tilde[m]);
    out.eta[m] = ss.eta;
    out.modes[m].sol = ss.w;
    out.modes[m].active = true;
  }
  return out;
}

TwoPhaseField solve_rswith(const GridSpec& grid, const InteriorForce& f,
                           const InterfaceData& data, cd lambda,
                           const FluidParams& fp) {
  TwoPhaseField v = solve_rswithout(grid, f, data, lambda, fp);

  // d~ = d - v_n trace (plus-side trace; w_n below is continuous across 0).
  std::vector<cd> d_tilde(grid.mode_count(), cd{});
  for (std::size_t m = 1; m < grid.mode_count(); ++m) {
    cd dt = data.d[m];
    if (v.mode_active(m)) dt -= v.eval_mode(m, Side::plus, 0.0).u[grid.n - 1];
    d_tilde[m] = dt;
  }
  TwoPhaseField w = surface_solve(grid, d_tilde, lambda, fp);

  // u = v + w: per-mode coefficients add (shared symbol table per mode).
  TwoPhaseField out = std::move(w);
  out.hh = std::move(v.hh);
  for (std::size_t m = 0; m < grid.mode_count(); ++m) {
    if (!v.modes[m].active) continue;
    if (!out.modes[m].active) {
      out.modes[m] = v.modes[m];
      continue;
    }
    for (int s = 0; s < 2; ++s) {
      for (int j = 0; j < grid.n; ++j) {
        out.modes[m].sol.uc[s][j].cM += v.modes[m].sol.uc[s][j].cM;
        out.modes[m].sol.uc[s][j].cE += v.modes[m].sol.uc[s][j].cE;
      }
      out.modes[m].sol.pc[s] += v.modes[m].sol.pc[s];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residual oracles
// ---------------------------------------------------------------------------

ResidualReport residual_report(const TwoPhaseField& field, const InteriorForce* f,
                               const InterfaceData* data) {
  const GridSpec& g = field.grid;
  const int n = g.n;
  const cd lambda = field.lambda;
  const std::vector<double> zs = g.vertical_nodes();
  ResidualReport rep;

  const InteriorForce* force = (f && !f->zero()) ? f : nullptr;
  std::vector<double> zs_signed[2];
  zs_signed[0] = zs;
  zs_signed[1].resize(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) zs_signed[1][i] = -zs[i];
  const VertExpTable tab_p(g, zs_signed[0]);
  const VertExpTable tab_m(g, zs_signed[1]);

  // --- spectral (analytic-derivative) rows over active modes ---
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (!field.mode_active(m) &&
        !(data && !data_mode_zero(*data, n, m))) {
      // an inactive mode with data would itself be a residual; data is
      // zero-mode filtered, so only m = 0 can land here with content
      continue;
    }
    double xit[2];
    g.mode_freq(m, xit);
    cd xi2{};
    for (int d = 0; d < n - 1; ++d) xi2 += cd(xit[d]) * xit[d];

    for (Side side : {Side::plus, Side::minus}) {
      const int si = side == Side::plus ? 0 : 1;
      const double mu = field.fp.mu(side);
      const double rho = field.fp.rho(side);
      const VertExpTable& tab = side == Side::plus ? tab_p : tab_m;
      for (std::size_t i = 0; i < zs.size(); ++i) {
        const double x = zs_signed[si][i];
        const ModeEval e = field.eval_mode(m, side, x);
        for (int j = 0; j < n; ++j) {
          cd res = rho * lambda * e.u[j] + mu * (xi2 * e.u[j] - e.d2u[j]);
          res += j < n - 1 ? kI * xit[j] * e.theta : e.dtheta;
          if (force) res -= force_value(g, *force, j, m, tab, i);
          rep.momentum = std::max(rep.momentum, std::abs(res));
        }
        cd div{};
        for (int j = 0; j < n - 1; ++j) div += kI * xit[j] * e.u[j];
        div += e.du[n - 1];
        rep.divergence = std::max(rep.divergence, std::abs(div));
      }
    }

    // interface rows
    const ModeEval up = field.trace(m, Side::plus);
    const ModeEval um = field.trace(m, Side::minus);
    const double mp = field.fp.mu_plus, mm = field.fp.mu_minus;
    for (int j = 0; j < n - 1; ++j) {
      const cd lhs = mp * (kI * xit[j] * up.u[n - 1] + up.du[j]) -
                     mm * (kI * xit[j] * um.u[n - 1] + um.du[j]);
      const cd want = data ? data->g[j][m] : cd{};
      rep.stress_jump = std::max(rep.stress_jump, std::abs(lhs + want));
    }
    {
      cd lhs = (2.0 * mp * up.du[n - 1] - up.theta) -
               (2.0 * mm * um.du[n - 1] - um.theta);
      const cd want = data ? data->g[n - 1][m] : cd{};
      if (field.has_surface) {
        const cd weight = field.fp.jump_rho() * field.fp.c_g -
                          field.fp.c_sigma * xi2;  // ([[rho]] c_g - c_sigma A^2)
        lhs -= weight * field.eta[m];
      }
      rep.stress_jump = std::max(rep.stress_jump, std::abs(lhs + want));
    }
    for (int j = 0; j < n; ++j) {
      const cd want = data ? data->h[j][m] : cd{};
      rep.velocity_jump =
          std::max(rep.velocity_jump, std::abs((up.u[j] - um.u[j]) - want));
    }
    if (field.has_surface) {
      const cd want = data ? data->d[m] : cd{};
      rep.kinematic = std::max(
          rep.kinematic, std::abs(lambda * field.eta[m] + up.u[n - 1] - want));
    }

    // decay envelope (boundary-driven part only; the periodized whole-space
    // part is not exponentially decaying by construction)
    if (field.modes[m].active) {
      const SymbolTable& t = field.modes[m].sol.tbl;
      for (Side side : {Side::plus, Side::minus}) {
        const ModeEval e0 = field.modes[m].sol.trace(side);
        const ModeEval eX = field.modes[m].sol.eval(side, sign_of(side) * g.X);
        double n0 = 0, nX = 0;
        for (int j = 0; j < n; ++j) {
          n0 += abs2(e0.u[j]);
          nX += abs2(eX.u[j]);
        }
        if (n0 < 1e-28) continue;
        const double rate = std::min(t.A.real(), t.B(side).real());
        const double env = std::exp(-0.5 * rate * g.X);
        rep.decay_envelope =
            std::max(rep.decay_envelope, std::sqrt(nX / n0) / env);
      }
    }
  }

  // --- physical-space finite-difference oracle (momentum rows) ---
  // Tangential derivatives stay spectral; only d/dx_n is replaced by
  // nonuniform central differences on the physical slices.
  const std::size_t P = g.mode_count();  // physical points per slice = modes
  double l2_acc = 0.0, l2_weight = 0.0;
  for (Side side : {Side::plus, Side::minus}) {
    const int si = side == Side::plus ? 0 : 1;
    const double mu = field.fp.mu(side);
    const double rho = field.fp.rho(side);
    const VertExpTable& tab = side == Side::plus ? tab_p : tab_m;

    // per-node physical slices, nodes indexed by vertical slot
    std::vector<std::vector<cd>> slices_u[3], slices_lap[3], slices_f[3],
        slices_gt[2];
    std::vector<std::vector<cd>> slices_th(zs.size());
    for (int j = 0; j < n; ++j) {
      slices_u[j].resize(zs.size());
      slices_lap[j].resize(zs.size());
      slices_f[j].resize(zs.size());
    }
    for (int d = 0; d < n - 1; ++d) slices_gt[d].resize(zs.size());

    for (std::size_t i = 0; i < zs.size(); ++i) {
      const double x = zs_signed[si][i];
      // gather per-mode values
      std::vector<cd> um[3], lapm[3], fm[3], gtm[2], thm;
      for (int j = 0; j < n; ++j) {
        um[j].assign(P, cd{});
        lapm[j].assign(P, cd{});
        fm[j].assign(P, cd{});
      }
      for (int d = 0; d < n - 1; ++d) gtm[d].assign(P, cd{});
      thm.assign(P, cd{});
      for (std::size_t m = 0; m < P; ++m) {
        if (!field.mode_active(m) && !force) continue;
        double xit[2];
        g.mode_freq(m, xit);
        cd xi2{};
        for (int d = 0; d < n - 1; ++d) xi2 += cd(xit[d]) * xit[d];
        if (field.mode_active(m)) {
          const ModeEval e = field.eval_mode(m, side, x);
          for (int j = 0; j < n; ++j) {
            um[j][m] = e.u[j];
            lapm[j][m] = -xi2 * e.u[j];
          }
          thm[m] = e.theta;
          for (int d = 0; d < n - 1; ++d) gtm[d][m] = kI * xit[d] * e.theta;
        }
        if (force)
          for (int j = 0; j < n; ++j)
            fm[j][m] = force_value(g, *force, j, m, tab, i);
      }
      for (int j = 0; j < n; ++j) {
        tangential_ifft(g, um[j], slices_u[j][i]);
        tangential_ifft(g, lapm[j], slices_lap[j][i]);
        tangential_ifft(g, fm[j], slices_f[j][i]);
      }
      for (int d = 0; d < n - 1; ++d) tangential_ifft(g, gtm[d], slices_gt[d][i]);
      tangential_ifft(g, thm, slices_th[i]);
    }

    // vertical central differences on interior slots
    for (std::size_t i = 1; i + 1 < zs.size(); ++i) {
      const double hm = zs[i] - zs[i - 1];
      const double hp = zs[i + 1] - zs[i];
      for (std::size_t p = 0; p < P; ++p) {
        for (int j = 0; j < n; ++j) {
          const cd d2 = fd_second(slices_u[j][i - 1][p], slices_u[j][i][p],
                                  slices_u[j][i + 1][p], hm, hp);
          cd res = rho * lambda * slices_u[j][i][p] -
                   mu * (slices_lap[j][i][p] + d2) - slices_f[j][i][p];
          if (j < n - 1) {
            res += slices_gt[j][i][p];
          } else {
            // n-th momentum row carries d_n theta; sign of x_n flips the
            // direction of increasing node index on the minus side
            cd dth = fd_first(slices_th[i - 1][p], slices_th[i][p],
                              slices_th[i + 1][p], hm, hp);
            if (side == Side::minus) dth = -dth;
            res += dth;
          }
          const double r = std::abs(res);
          rep.momentum_fd = std::max(rep.momentum_fd, r);
          l2_acc += r * r;
          l2_weight += 1.0;
        }
      }
    }
  }
  if (l2_weight > 0) rep.momentum_fd_l2 = std::sqrt(l2_acc / l2_weight);
  return rep;
}

// ---------------------------------------------------------------------------
// Norms and resolvent ratio
// ---------------------------------------------------------------------------

namespace {

// Tangential Sobolev multipliers sum_{|alpha| <= k} |xi^alpha|^2.
double sobolev_weight2(const double xit[2], int nt, int k) {
  double acc = 0.0;
  for (int a1 = 0; a1 <= k; ++a1)
    for (int a2 = 0; a2 <= (nt == 2 ? k - a1 : 0); ++a2) {
      const double v = std::pow(std::abs(xit[0]), a1) *
                       (nt == 2 ? std::pow(std::abs(xit[1]), a2) : 1.0);
      acc += v * v;
    }
  return acc;
}

// Canonical bulk lift of jump data: value(+-0) = +-[[v]]/2, decay e^{-A~|x_n|}.
struct JumpLift {
  cd val{};    // value at (side, z)
  cd dval{};   // d/dx_n
  double At = 0.0;
};

JumpLift lift(cd jump, Side side, double z_abs, double At) {
  JumpLift l;
  l.At = At;
  const double s = side == Side::plus ? 1.0 : -1.0;
  l.val = 0.5 * s * jump * std::exp(-At * z_abs);
  l.dval = -s * At * l.val;  // d/dx_n: -At val upper, +At val lower
  return l;
}

}  // namespace

RatioReport norms_and_ratio(const TwoPhaseField& field, const InteriorForce* f,
                            const InterfaceData* data, int q) {
  if (q < 1) throw std::invalid_argument("norms_and_ratio: q must be >= 1");
  const GridSpec& g = field.grid;
  const int n = g.n, nt = n - 1;
  const double absl = std::abs(field.lambda);
  const double sql = std::sqrt(absl);
  const std::vector<double> zs = g.vertical_nodes();
  double w_trace;
  std::vector<double> wz;
  g.vertical_weights(zs, w_trace, wz);

  double area = 2.0 * pi * g.L[0];
  if (n == 3) area *= 2.0 * pi * g.L[1];

  const InteriorForce* force = (f && !f->zero()) ? f : nullptr;
  const VertExpTable tab_p(g, zs);
  std::vector<double> zneg(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) zneg[i] = -zs[i];
  const VertExpTable tab_m(g, zneg);

  // Per-(mode, side, node) squared magnitudes of the LHS and RHS stacks;
  // Parseval for q = 2, physical sampling otherwise.
  const bool parseval = (q == 2);

  // collects |.|^2 per (mode) for one (side, node); for q != 2 the caller
  // transforms component-wise, so we keep per-component mode vectors instead.
  struct Stack {
    std::vector<std::vector<cd>> comp;  // [component][mode]
    void ensure(std::size_t c, std::size_t m) {
      if (comp.size() < c) comp.resize(c);
      for (auto& v : comp)
        if (v.size() != m) v.assign(m, cd{});
    }
    void clear() {
      for (auto& v : comp) std::fill(v.begin(), v.end(), cd{});
    }
  };

  const std::size_t P = g.mode_count();
  // component counts: LHS bulk: n + n*n + n*n*n + n; RHS bulk: n + n + n*n + n + n*n*n + 1
  const std::size_t lhs_c = static_cast<std::size_t>(n + n * n + n * n * n + n);
  const std::size_t rhs_c = static_cast<std::size_t>(n + n + n * n + n + n * n * n + 1);
  Stack lhs_stack, rhs_stack;
  lhs_stack.ensure(lhs_c, P);
  rhs_stack.ensure(rhs_c, P);

  double lhs_acc = 0.0, rhs_acc = 0.0;  // sum of |.|^q * weight
  double lam_u_acc = 0, sg_acc = 0, g2_acc = 0, gt_acc = 0;
  double f_acc = 0, gterm_acc = 0, hterm_acc = 0;

  std::vector<cd> phys;
  const auto fold = [&](Stack& st, double weight, double& total) {
    // Parseval: sum over modes of squared magnitudes; physical: transform each
    // component and accumulate pointwise l2 across components then |.|^q.
    if (parseval) {
      double s = 0.0;
      for (std::size_t c = 0; c < st.comp.size(); ++c)
        for (std::size_t m = 0; m < P; ++m) s += abs2(st.comp[c][m]);
      total += s * weight * area;
      return;
    }
    std::vector<double> mag2(P, 0.0);
    for (std::size_t c = 0; c < st.comp.size(); ++c) {
      tangential_ifft(g, st.comp[c], phys);
      for (std::size_t p = 0; p < P; ++p) mag2[p] += abs2(phys[p]);
    }
    double s = 0.0;
    for (std::size_t p = 0; p < P; ++p) s += std::pow(mag2[p], 0.5 * q);
    total += s * weight * area / static_cast<double>(P);
  };

  // ---- bulk terms: loop sides x nodes (plus the x_n = 0 trace slot) ----
  for (Side side : {Side::plus, Side::minus}) {
    const VertExpTable& tab = side == Side::plus ? tab_p : tab_m;
    for (std::size_t i = 0; i <= zs.size(); ++i) {
      // slot zs.size() is the interface trace with weight w_trace
      const bool trace_slot = (i == zs.size());
      const double z_abs = trace_slot ? 0.0 : zs[i];
      const double x = (side == Side::plus ? z_abs : -z_abs);
      const double wnode = trace_slot ? w_trace : wz[i];
      lhs_stack.clear();
      rhs_stack.clear();

      for (std::size_t m = 0; m < P; ++m) {
        double xit[2];
        g.mode_freq(m, xit);
        const double At = std::sqrt(xit[0] * xit[0] + xit[1] * xit[1]);
        if (field.mode_active(m)) {
          const ModeEval e = field.eval_mode(m, side, x);
          std::size_t c = 0;
          for (int j = 0; j < n; ++j) lhs_stack.comp[c++][m] = absl * e.u[j];
          for (int j = 0; j < n; ++j)
            for (int d = 0; d < n; ++d)
              lhs_stack.comp[c++][m] =
                  sql * (d < nt ? kI * xit[d] * e.u[j] : e.du[j]);
          for (int j = 0; j < n; ++j)
            for (int d1 = 0; d1 < n; ++d1)
              for (int d2 = 0; d2 < n; ++d2) {
                cd v;
                if (d1 < nt && d2 < nt)
                  v = -xit[d1] * xit[d2] * e.u[j];
                else if (d1 < nt)
                  v = kI * xit[d1] * e.du[j];
                else if (d2 < nt)
                  v = kI * xit[d2] * e.du[j];
                else
                  v = e.d2u[j];
                lhs_stack.comp[c++][m] = v;
              }
          for (int d = 0; d < n; ++d)
            lhs_stack.comp[c++][m] = d < nt ? kI * xit[d] * e.theta : e.dtheta;
        }

        // RHS stack
        std::size_t c = 0;
        if (force && !trace_slot)
          for (int j = 0; j < n; ++j)
            rhs_stack.comp[c + static_cast<std::size_t>(j)][m] =
                force_value(g, *force, j, m, tab, i);
        c += static_cast<std::size_t>(n);
        if (data && m != 0 && At > 0.0) {
          for (int j = 0; j < n; ++j) {
            const JumpLift lg = lift(data->g[j][m], side, z_abs, At);
            rhs_stack.comp[c + static_cast<std::size_t>(j)][m] = sql * lg.val;
            for (int d = 0; d < n; ++d)
              rhs_stack.comp[c + static_cast<std::size_t>(n + j * n + d)][m] =
                  d < nt ? kI * xit[d] * lg.val : lg.dval;
          }
          std::size_t ch = c + static_cast<std::size_t>(n + n * n);
          for (int j = 0; j < n; ++j) {
            const JumpLift lh = lift(data->h[j][m], side, z_abs, At);
            rhs_stack.comp[ch + static_cast<std::size_t>(j)][m] = absl * lh.val;
            for (int d1 = 0; d1 < n; ++d1)
              for (int d2 = 0; d2 < n; ++d2) {
                cd v;
                if (d1 < nt && d2 < nt)
                  v = -xit[d1] * xit[d2] * lh.val;
                else if (d1 < nt)
                  v = kI * xit[d1] * lh.dval;
                else if (d2 < nt)
                  v = kI * xit[d2] * lh.dval;
                else
                  v = At * At * lh.val;  // second normal derivative of the lift
                rhs_stack.comp[ch + static_cast<std::size_t>(n + j * n * n +
                                                             d1 * n + d2)][m] = v;
              }
          }
          const JumpLift lhn = lift(data->h[n - 1][m], side, z_abs, At);
          rhs_stack.comp[rhs_c - 1][m] = absl / At * lhn.dval;
        }
      }

      fold(lhs_stack, wnode, lhs_acc);
      fold(rhs_stack, wnode, rhs_acc);
      if (parseval) {
        // per-piece accumulators (q = 2 only; used for reporting)
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
        std::size_t c = 0;
        for (int j = 0; j < n; ++j, ++c)
          for (std::size_t m = 0; m < P; ++m) s0 += abs2(lhs_stack.comp[c][m]);
        for (int j = 0; j < n * n; ++j, ++c)
          for (std::size_t m = 0; m < P; ++m) s1 += abs2(lhs_stack.comp[c][m]);
        for (int j = 0; j < n * n * n; ++j, ++c)
          for (std::size_t m = 0; m < P; ++m) s2 += abs2(lhs_stack.comp[c][m]);
        for (int j = 0; j < n; ++j, ++c)
          for (std::size_t m = 0; m < P; ++m) s3 += abs2(lhs_stack.comp[c][m]);
        lam_u_acc += s0 * wnode * area;
        sg_acc += s1 * wnode * area;
        g2_acc += s2 * wnode * area;
        gt_acc += s3 * wnode * area;
        double r0 = 0, r1 = 0, r2 = 0;
        c = 0;
        for (int j = 0; j < n; ++j, ++c)
          for (std::size_t m = 0; m < P; ++m) r0 += abs2(rhs_stack.comp[c][m]);
        for (int j = 0; j < n + n * n; ++j, ++c)
          for (std::size_t m = 0; m < P; ++m) r1 += abs2(rhs_stack.comp[c][m]);
        for (int j = 0; j < n + n * n * n + 1; ++j, ++c)
          for (std::size_t m = 0; m < P; ++m) r2 += abs2(rhs_stack.comp[c][m]);
        f_acc += r0 * wnode * area;
        gterm_acc += r1 * wnode * area;
        hterm_acc += r2 * wnode * area;
      }
    }
  }

  // ---- interface terms: eta and d Sobolev norms on the tangential torus ----
  double area_t = 2.0 * pi * g.L[0];
  if (n == 3) area_t *= 2.0 * pi * g.L[1];
  const auto tangential_wk_q = [&](const std::vector<cd>& modes_vec, int k) {
    if (modes_vec.empty()) return 0.0;
    if (parseval) {
      double s = 0.0;
      for (std::size_t m = 0; m < P; ++m) {
        double xit[2];
        g.mode_freq(m, xit);
        s += sobolev_weight2(xit, nt, k) * abs2(modes_vec[m]);
      }
      return std::sqrt(s * area_t);
    }
    // physical route: accumulate each derivative field separately
    double acc = 0.0;
    std::vector<cd> dmodes(P), ph;
    for (int a1 = 0; a1 <= k; ++a1)
      for (int a2 = 0; a2 <= (nt == 2 ? k - a1 : 0); ++a2) {
        if (a1 + a2 > k || (nt == 1 && a2 > 0)) continue;
        for (std::size_t m = 0; m < P; ++m) {
          double xit[2];
          g.mode_freq(m, xit);
          dmodes[m] = modes_vec[m] * std::pow(kI * xit[0], a1) *
                      (nt == 2 ? std::pow(kI * xit[1], a2) : cd(1.0));
        }
        tangential_ifft(g, dmodes, ph);
        double s = 0.0;
        for (std::size_t p = 0; p < P; ++p) s += std::pow(std::abs(ph[p]), q);
        acc += s * area_t / static_cast<double>(P);
      }
    return std::pow(acc, 1.0 / q);
  };

  RatioReport rep;
  rep.lam_u = std::sqrt(lam_u_acc);
  rep.sqlam_grad_u = std::sqrt(sg_acc);
  rep.grad2_u = std::sqrt(g2_acc);
  rep.grad_theta = std::sqrt(gt_acc);
  rep.f_norm = std::sqrt(f_acc);
  rep.g_terms = std::sqrt(gterm_acc);
  rep.h_terms = std::sqrt(hterm_acc);

  double lhs_q = lhs_acc;  // accumulated ||stack||_qq^qq
  double rhs_q = rhs_acc;
  const double qq = parseval ? 2.0 : static_cast<double>(q);

  double eta_w2 = 0, eta_w3 = 0, eta_w1 = 0, eta_l0 = 0;
  if (field.has_surface && !field.eta.empty()) {
    eta_w2 = tangential_wk_q(field.eta, 2);
    eta_w3 = tangential_wk_q(field.eta, 3);
    eta_w1 = tangential_wk_q(field.eta, 1);
    eta_l0 = tangential_wk_q(field.eta, 0);
    rep.eta_w2 = absl * eta_w2;
    rep.eta_w3 = eta_w3;
    rep.eta_w1_raw = eta_w1;
    rep.eta_l0_raw = eta_l0;
    lhs_q += std::pow(rep.eta_w2, qq) + std::pow(rep.eta_w3, qq);
  }
  double d_w2 = 0, d_w1 = 0, d_l0 = 0;
  if (data) {
    d_w2 = tangential_wk_q(data->d, 2);
    d_w1 = tangential_wk_q(data->d, 1);
    d_l0 = tangential_wk_q(data->d, 0);
    rep.d_w2 = d_w2;
    rep.d_w1_raw = d_w1;
    rep.d_l0_raw = d_l0;
    if (field.has_surface) rhs_q += std::pow(d_w2, qq);
  }

  rep.lhs = std::pow(lhs_q, 1.0 / qq);
  rep.rhs = std::pow(rhs_q, 1.0 / qq);
  if (rep.rhs > 0.0) {
    rep.ratio = rep.lhs / rep.rhs;
  } else {
    rep.ratio = 0.0;
    rep.inconsistent = rep.lhs > 1e-12;
  }

  if (field.has_surface) {
    const double rhs1 = rep.rhs + sql * d_w1;
    const double rhs0 = rep.rhs + absl * d_l0;
    rep.eta_w1_ratio = rhs1 > 0 ? absl * sql * eta_w1 / rhs1 : 0.0;
    rep.eta_l0_ratio = rhs0 > 0 ? absl * absl * eta_l0 / rhs0 : 0.0;
  }
  return rep;
}

}  // namespace stokes2p
