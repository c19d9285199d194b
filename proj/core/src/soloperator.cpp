// soloperator.cpp -- jump extension, T[m] quadrature and empirical bounds.

#include "stokes2p/soloperator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "stokes2p/rng.hpp"
#include "stokes2p/threads.hpp"

namespace stokes2p {

namespace {
constexpr cd kI{0.0, 1.0};
}

HalfGrid make_half_grid(const GridSpec& g, int level) {
  if (level < 0 || level > 8)
    throw std::invalid_argument("make_half_grid: level must be in [0, 8]");
  GridSpec gg = g;
  gg.n_vertical = g.n_vertical << level;
  gg.validate();
  HalfGrid hg;
  hg.grid = gg;
  hg.nodes = gg.vertical_nodes();
  double w_trace = 0.0;
  gg.vertical_weights(hg.nodes, w_trace, hg.weights);
  hg.weights.front() += w_trace;  // fold the [0, y_0] sliver into node 0
  return hg;
}

HalfSpaceFunction zero_function(const HalfGrid& hg) {
  HalfSpaceFunction f;
  f.v.assign(hg.size(), cd{});
  return f;
}

HalfSpaceFunction jjump_extend(const HalfGrid& hg, const TwoPhaseSampler& f) {
  HalfSpaceFunction out = zero_function(hg);
  const std::size_t M = hg.grid.mode_count();
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t i = 0; i < hg.nodes.size(); ++i)
      out.v[hg.at(m, i)] = f(m, hg.nodes[i]) - f(m, -hg.nodes[i]);
  return out;
}

HalfSpaceFunction jjump_extend(const HalfGrid& hg, const TwoPhaseField& f,
                               int component) {
  const int n = f.grid.n;
  if (component < 0 || component > n)
    throw std::invalid_argument("jjump_extend: component out of range");
  return jjump_extend(hg, [&f, component, n](std::size_t m, double x) {
    const ModeEval e = f.eval_mode(m, x >= 0.0 ? Side::plus : Side::minus, x);
    return component < n ? e.u[static_cast<std::size_t>(component)] : e.theta;
  });
}

namespace {

double lq_fold(const HalfGrid& hg, const std::vector<cd>& vals, int q) {
  // vals indexed [mode * nodes + i]; tangential Parseval for q = 2, physical
  // transform per vertical node otherwise.
  const std::size_t M = hg.grid.mode_count();
  const std::size_t N = hg.nodes.size();
  double area = 2.0 * pi * hg.grid.L[0];
  if (hg.grid.n == 3) area *= 2.0 * pi * hg.grid.L[1];
  if (q == 2) {
    double acc = 0.0;
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t i = 0; i < N; ++i)
        acc += std::norm(vals[m * N + i]) * hg.weights[i];
    return std::sqrt(acc * area);
  }
  double acc = 0.0;
  std::vector<cd> modes(M), phys;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < M; ++m) modes[m] = vals[m * N + i];
    tangential_ifft(hg.grid, modes, phys);
    double s = 0.0;
    for (const cd& v : phys) s += std::pow(std::abs(v), q);
    acc += s * hg.weights[i] * area / static_cast<double>(M);
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace

double lq_norm(const HalfGrid& hg, const HalfSpaceFunction& f, int q) {
  if (q < 1) throw std::invalid_argument("lq_norm: q must be >= 1");
  return lq_fold(hg, f.v, q);
}

double lq_norm_two_phase(const HalfGrid& hg, const TwoPhaseSampler& f, int q) {
  if (q < 1) throw std::invalid_argument("lq_norm_two_phase: q must be >= 1");
  const std::size_t M = hg.grid.mode_count();
  const std::size_t N = hg.nodes.size();
  std::vector<cd> up(M * N), dn(M * N);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t i = 0; i < N; ++i) {
      up[m * N + i] = f(m, hg.nodes[i]);
      dn[m * N + i] = f(m, -hg.nodes[i]);
    }
  const double a = lq_fold(hg, up, q), b = lq_fold(hg, dn, q);
  return std::pow(std::pow(a, q) + std::pow(b, q), 1.0 / q);
}

HalfSpaceFunction apply_T(const HalfGrid& hg, const ModeKernel& m,
                          const HalfSpaceFunction& f) {
  if (f.v.size() != hg.size())
    throw std::invalid_argument("apply_T: function does not match the grid");
  HalfSpaceFunction out = zero_function(hg);
  const std::size_t M = hg.grid.mode_count();
  const std::size_t N = hg.nodes.size();
  for (std::size_t mo = 0; mo < M; ++mo) {
    // skip silent zero columns
    bool nonzero = false;
    for (std::size_t j = 0; j < N && !nonzero; ++j)
      nonzero = f.v[mo * N + j] != cd{};
    if (!nonzero) continue;
    for (std::size_t i = 0; i < N; ++i) {
      cd acc{};
      for (std::size_t j = 0; j < N; ++j)
        acc += hg.weights[j] * m(mo, hg.nodes[i] + hg.nodes[j]) * f.v[mo * N + j];
      out.v[mo * N + i] = acc;
    }
  }
  return out;
}

double empirical_bound(const HalfGrid& hg, const ModeKernel& m, int q,
                       int ensemble_size, std::uint64_t seed, int threads) {
  if (ensemble_size < 1)
    throw std::invalid_argument("empirical_bound: ensemble_size must be >= 1");
  const std::size_t N = hg.nodes.size();
  const int m1 = hg.grid.m1(), m2 = hg.grid.m2();
  const int band1 = std::max(1, std::min(2, m1 / 2 - 1));
  const int band2 = hg.grid.n == 3 ? std::max(1, std::min(2, m2 / 2 - 1)) : 0;

  // Draw all members up front (single stream, deterministic), then evaluate
  // ratios in parallel chunks with an order-independent max reduction.
  // Every fourth member carries the grid-resolved power profile y^{-1/2}
  // instead of smooth exponentials: dilation-invariant kernels such as the
  // negative control only reveal their sharp constant through log-spread
  // profiles, and the realizable spread [y_0, X] widens as the grid refines.
  std::vector<HalfSpaceFunction> members;
  members.reserve(static_cast<std::size_t>(ensemble_size));
  Rng rng(seed);
  for (int e = 0; e < ensemble_size; ++e) {
    HalfSpaceFunction f = zero_function(hg);
    const bool power_member = (e % 4) == 3;
    for (int k1 = -band1; k1 <= band1; ++k1)
      for (int k2 = -band2; k2 <= band2; ++k2) {
        if (k1 == 0 && k2 == 0) continue;  // zero tangential mode excluded
        const std::size_t mo = hg.grid.mode_index((k1 + m1) % m1, (k2 + m2) % m2);
        if (power_member) {
          const cd c = rng.unit_normalish();
          for (std::size_t i = 0; i < N; ++i)
            f.v[hg.at(mo, i)] += c / std::sqrt(hg.nodes[i]);
          continue;
        }
        // smooth decaying vertical profile: three random exponentials
        cd c[3];
        double al[3];
        for (int p = 0; p < 3; ++p) {
          c[p] = rng.unit_normalish();
          al[p] = (p + 1) * rng.uniform(0.4, 1.6);
        }
        for (std::size_t i = 0; i < N; ++i) {
          cd v{};
          for (int p = 0; p < 3; ++p) v += c[p] * std::exp(-al[p] * hg.nodes[i]);
          f.v[hg.at(mo, i)] += v;
        }
      }
    members.push_back(std::move(f));
  }

  std::vector<double> ratio(members.size(), 0.0);
  parallel_chunks(members.size(), threads,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t e = begin; e < end; ++e) {
                      const double den = lq_norm(hg, members[e], q);
                      if (den <= 0.0) continue;
                      const HalfSpaceFunction Tf = apply_T(hg, m, members[e]);
                      ratio[e] = lq_norm(hg, Tf, q) / den;
                    }
                  });
  double worst = 0.0;
  for (double r : ratio) worst = std::max(worst, r);
  return worst;
}

ModeKernel make_exp_kernel(const HalfGrid& hg) {
  std::vector<double> At(hg.grid.mode_count());
  for (std::size_t m = 0; m < At.size(); ++m) {
    double xit[2];
    hg.grid.mode_freq(m, xit);
    At[m] = std::sqrt(xit[0] * xit[0] + xit[1] * xit[1]);
  }
  return [At = std::move(At)](std::size_t mode, double s) -> cd {
    if (At[mode] == 0.0) return cd{};  // zero mode filtered
    return std::exp(-At[mode] * s);
  };
}

ModeKernel make_negative_control() {
  return [](std::size_t, double s) -> cd { return 1.0 / s; };
}

ModeKernel make_sfamily_kernel(const HalfGrid& hg, cd lambda, const FluidParams& fp,
                               SymbolKind kind, int variant, int j, int k,
                               int m_index) {
  const std::size_t M = hg.grid.mode_count();
  auto tables = std::make_shared<std::vector<SymbolTable>>();
  auto active = std::make_shared<std::vector<unsigned char>>(M, 0);
  tables->resize(M);
  for (std::size_t m = 1; m < M; ++m) {
    SpectralPoint pt;
    pt.dim = hg.grid.n;
    pt.lambda = lambda;
    double xit[2];
    hg.grid.mode_freq(m, xit);
    for (int d = 0; d < hg.grid.n - 1; ++d)
      pt.xi[static_cast<std::size_t>(d)] = xit[d];
    (*tables)[m] = build_symbol_table(pt, fp);
    (*active)[m] = 1;
  }
  SymbolRequest base;
  base.kind = kind;
  base.j = j;
  base.k = k;
  base.m_index = m_index;
  base.side = Side::plus;
  return [tables, active, base, kind, variant](std::size_t mode, double s) -> cd {
    if (!(*active)[mode]) return cd{};
    SymbolRequest req = base;
    req.x_n = s;
    return s_family_symbol(kind, variant, req, (*tables)[mode]);
  };
}

cd sol1_velocity(const SymbolTable& t, const Sol1Profiles& pr, int j, double x,
                 const PanelQuadrature& quad) {
  const int n = t.n;
  const double cu = pr.c_up, cdn = pr.c_dn;
  if (!(cu > 0.0) || !(cdn > 0.0))
    throw std::invalid_argument("sol1_velocity: profile rates must be positive");

  cd acc{};
  for (std::size_t qi = 0; qi < quad.nodes.size(); ++qi) {
    const double y = quad.nodes[qi];
    const double w = quad.weights[qi];
    const double eu = std::exp(-cu * y), ed = std::exp(-cdn * y);
    const Basis b = eval_basis(t, Side::plus, x + y);
    cd val{};
    for (int k = 0; k < n; ++k) {
      // J a(y) = a(y) - a(-y); J a'(y) = a'(y) + a'(-y)
      const cd Jg = pr.g_up[static_cast<std::size_t>(k)] * eu -
                    pr.g_dn[static_cast<std::size_t>(k)] * ed;
      const cd Jdg = -cu * pr.g_up[static_cast<std::size_t>(k)] * eu +
                     cdn * pr.g_dn[static_cast<std::size_t>(k)] * ed;
      const cd Jh = pr.h_up[static_cast<std::size_t>(k)] * eu -
                    pr.h_dn[static_cast<std::size_t>(k)] * ed;
      const cd Jdh = -cu * pr.h_up[static_cast<std::size_t>(k)] * eu +
                     cdn * pr.h_dn[static_cast<std::size_t>(k)] * ed;
      const CoefPair pc = phi_coef(t, k, Side::plus, j);
      const CoefPair qc = psi_coef(t, k, Side::plus, j);
      const cd P = eval_pair(pc, b, 0), dP = eval_pair(pc, b, 1);
      const cd Q = eval_pair(qc, b, 0), dQ = eval_pair(qc, b, 1);
      val += dP * Jg + P * Jdg + dQ * Jh + Q * Jdh;
    }
    acc += w * val;
  }
  return -acc;
}

}  // namespace stokes2p
