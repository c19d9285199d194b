// certifier.cpp -- empirical bound sweeps over the complex sectors.

#include "stokes2p/certifier.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

#include "stokes2p/grids.hpp"
#include "stokes2p/rng.hpp"
#include "stokes2p/threads.hpp"

namespace stokes2p {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoSample = static_cast<std::size_t>(-1);

struct RowSpec {
  std::string id;
  bool floor = false;
};

struct Worst {
  double ratio = 0.0;
  std::size_t sample = kNoSample;
};

// Per-chunk extreme slots merged in chunk order: the reduction is identical
// for every thread count and ties resolve to the smallest sample index.
class SweepAccum {
 public:
  SweepAccum(const std::vector<RowSpec>& rows, std::size_t n_chunks)
      : rows_(rows), slots_(rows.size() * n_chunks) {
    for (auto& w : slots_) w.ratio = kInf;  // overwritten on first note()
    for (std::size_t c = 0; c < n_chunks; ++c)
      for (std::size_t r = 0; r < rows_.size(); ++r)
        slots_[c * rows_.size() + r].ratio = rows_[r].floor ? kInf : -kInf;
  }

  void note(std::size_t chunk, std::size_t row, double ratio, std::size_t sample) {
    if (std::isnan(ratio)) ratio = rows_[row].floor ? -kInf : kInf;
    Worst& w = slots_[chunk * rows_.size() + row];
    const bool better = rows_[row].floor ? ratio < w.ratio : ratio > w.ratio;
    if (better || w.sample == kNoSample) {
      w.ratio = ratio;
      w.sample = sample;
    }
  }

  std::vector<Worst> merge() const {
    std::vector<Worst> out(rows_.size());
    const std::size_t n_chunks = slots_.size() / rows_.size();
    for (std::size_t c = 0; c < n_chunks; ++c)
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Worst& w = slots_[c * rows_.size() + r];
        if (w.sample == kNoSample) continue;
        const bool better = out[r].sample == kNoSample ||
                            (rows_[r].floor ? w.ratio < out[r].ratio
                                            : w.ratio > out[r].ratio);
        if (better) out[r] = w;
      }
    return out;
  }

 private:
  std::vector<RowSpec> rows_;
  std::vector<Worst> slots_;
};

// Runs per_sample(sample, note) over the cloud and folds one BoundReport per
// row.  note(row, ratio) may be called any number of times per sample.
template <class PerSample>
std::vector<BoundReport> sweep(const std::vector<SectorSample>& samples,
                               const CertifyLimits& lim, int threads,
                               const std::vector<RowSpec>& rows,
                               PerSample&& per_sample) {
  if (samples.empty())
    throw std::invalid_argument("certifier: empty sample set");
  const std::size_t n_chunks = (samples.size() + kChunkSize - 1) / kChunkSize;
  SweepAccum acc(rows, n_chunks);
  parallel_chunks(samples.size(), threads,
                  [&](std::size_t chunk, std::size_t b, std::size_t e) {
                    for (std::size_t i = b; i < e; ++i)
                      per_sample(samples[i], [&](std::size_t row, double ratio) {
                        acc.note(chunk, row, ratio, i);
                      });
                  });
  const std::vector<Worst> worst = acc.merge();

  std::vector<BoundReport> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    BoundReport& rep = out[r];
    rep.bound_id = rows[r].id;
    rep.n = samples.front().pt.dim;
    rep.samples = samples.size();
    rep.is_floor = rows[r].floor;
    rep.worst_ratio = worst[r].ratio;
    if (worst[r].sample != kNoSample) {
      const SectorSample& s = samples[worst[r].sample];
      rep.arg_worst = s.pt;
      rep.worst_xi_n = s.xi_n;
      rep.worst_x_n = s.x_n;
    }
    rep.pass = std::isfinite(rep.worst_ratio) &&
               (rep.is_floor ? rep.worst_ratio > lim.floor
                             : rep.worst_ratio < lim.ratio_ceiling);
  }
  return out;
}

double scale_S(const SymbolTable& t) {
  return std::sqrt(std::abs(t.lambda)) + t.A_tilde;
}

// Value and d/dx_n of the unweighted pressure variant-5 member for data
// column h_n: rho mu^{-1} lambda^{1/2} B^{-2} omega_{n,side}(x).
std::pair<cd, cd> unweighted_omega_member(const SymbolTable& t, Side side, double x) {
  const cd B = t.B(side);
  const cd pref = (t.fp.rho(side) / t.fp.mu(side)) * t.sqrt_lambda / (B * B);
  const cd oc = omega_coef(t, t.n - 1, side);
  const Basis b = eval_basis(t, side, x);
  return {pref * oc * b.eA[0], pref * oc * b.eA[1]};
}

}  // namespace

void SectorSampling::validate() const {
  if (n != 2 && n != 3)
    throw std::invalid_argument("SectorSampling: n must be 2 or 3");
  if (!(epsilon > 0.0) || !(epsilon < pi / 2))
    throw std::invalid_argument("SectorSampling: epsilon must lie in (0, pi/2)");
  if (!(eta > 0.0) || !(eta < std::min(pi / 4, epsilon / 2)))
    throw std::invalid_argument(
        "SectorSampling: eta must lie in (0, min(pi/4, epsilon/2))");
  if (!(margin > 0.0) || !(margin < eta))
    throw std::invalid_argument("SectorSampling: margin must lie in (0, eta)");
  if (gamma0 < 0.0)
    throw std::invalid_argument("SectorSampling: gamma0 must be >= 0");
  if (n_radii < 1 || n_angles < 1 || n_xn < 1 || n_jitter < 0)
    throw std::invalid_argument("SectorSampling: grid counts must be positive");
  if (!(radius_range[0] > 0.0) || !(radius_range[1] >= radius_range[0]) ||
      !(xi_radius_range[0] > 0.0) || !(xi_radius_range[1] >= xi_radius_range[0]) ||
      !(xn_range[0] > 0.0) || !(xn_range[1] >= xn_range[0]))
    throw std::invalid_argument("SectorSampling: ranges must be positive and ordered");
}

std::vector<SectorSample> sample_sectors(const SectorSampling& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const int nt = cfg.n - 1;
  const double arg_max = pi - cfg.epsilon - cfg.margin;
  const double lobe_max = cfg.eta - cfg.margin;

  const std::vector<double> radii =
      log_space(cfg.radius_range[0], cfg.radius_range[1], cfg.n_radii);
  const std::vector<double> angles =
      cfg.n_angles == 1 ? std::vector<double>{0.0}
                        : lin_space(-arg_max, arg_max, cfg.n_angles);
  const std::vector<double> xns = log_space(cfg.xn_range[0], cfg.xn_range[1], cfg.n_xn);

  // Lobe choice is a deterministic parity of (sample, slot) so both lobes are
  // guaranteed on every slot; magnitude and in-lobe angle come from the rng.
  std::uint64_t q = 0;
  const auto draw_xi = [&](int slot) -> cd {
    const bool lobe_pi = ((q + static_cast<std::uint64_t>(slot)) & 1u) != 0;
    const double mag = rng.log_uniform(cfg.xi_radius_range[0], cfg.xi_radius_range[1]);
    const double ang = rng.uniform(-lobe_max, lobe_max);
    const cd z = std::polar(mag, ang);
    return lobe_pi ? -z : z;
  };

  std::vector<SectorSample> out;
  out.reserve(cfg.total());
  for (double r : radii)
    for (double a : angles)
      for (double x : xns) {
        SectorSample s;
        s.pt.dim = cfg.n;
        s.pt.lambda = std::polar(std::max(r, cfg.gamma0), a);
        for (int j = 0; j < nt; ++j) s.pt.xi[static_cast<std::size_t>(j)] = draw_xi(j);
        s.xi_n = draw_xi(nt);
        s.x_n = x;
        out.push_back(s);
        ++q;
      }
  const double r_lo = std::max(cfg.radius_range[0], cfg.gamma0);
  const double r_hi = std::max(cfg.radius_range[1], r_lo);
  for (int i = 0; i < cfg.n_jitter; ++i) {
    SectorSample s;
    s.pt.dim = cfg.n;
    s.pt.lambda = std::polar(rng.log_uniform(r_lo, r_hi), rng.uniform(-arg_max, arg_max));
    for (int j = 0; j < nt; ++j) s.pt.xi[static_cast<std::size_t>(j)] = draw_xi(j);
    s.xi_n = draw_xi(nt);
    s.x_n = rng.log_uniform(cfg.xn_range[0], cfg.xn_range[1]);
    out.push_back(s);
    ++q;
  }
  return out;
}

std::vector<BoundReport> check_root_bounds(const std::vector<SectorSample>& samples,
                                           const FluidParams& fp,
                                           const CertifyLimits& lim, int threads) {
  const std::vector<RowSpec> rows = {
      {"lemma52_ReA_floor", true},     {"lemma52_absA_ceil", false},
      {"lemma52_ReBp_floor", true},    {"lemma52_ReBm_floor", true},
      {"lemma52_absBp_ceil", false},   {"lemma52_absBm_ceil", false},
      {"lemma52_denom_floor", true},   {"kernel_expA_decay_ceil", false},
      {"kernel_M_decay_ceil", false},  {"kernel_expB_decay_ceil", false},
  };
  return sweep(samples, lim, threads, rows, [&](const SectorSample& s, auto note) {
    const SymbolTable t = build_symbol_table(s.pt, fp);
    const double S = scale_S(t);
    note(0, t.A.real() / t.A_tilde);
    note(1, std::abs(t.A) / t.A_tilde);
    note(2, t.B_plus.real() / S);
    note(3, t.B_minus.real() / S);
    note(4, std::abs(t.B_plus) / S);
    note(5, std::abs(t.B_minus) / S);
    note(6, std::abs(t.denomD) / S);
    for (Side side : {Side::plus, Side::minus}) {
      const Basis b = eval_basis(t, side, sign_of(side) * s.x_n);
      for (int m = 0; m <= 3; ++m) {
        note(7, std::abs(b.eA[m]) * s.x_n * std::pow(t.A_tilde, 1 - m));
        note(8, std::abs(b.M[m]) * s.x_n * std::pow(S, 2 - m));
        note(9, std::abs(b.E[m]) * s.x_n * std::pow(S, 1 - m));
      }
    }
  });
}

// Homogeneity exponents of the 16 cofactors in (|lambda|^{1/2} + A~).
constexpr int kCofPow[4][4] = {{2, 2, 3, 4}, {1, 1, 2, 3}, {2, 2, 3, 4}, {1, 1, 2, 3}};

std::vector<BoundReport> check_cofactor_growth(const std::vector<SectorSample>& samples,
                                               const FluidParams& fp,
                                               const CertifyLimits& lim, int threads) {
  const int n = samples.empty() ? 3 : samples.front().pt.dim;

  std::vector<RowSpec> rows;
  for (int i = 1; i <= 4; ++i)
    for (int s = 1; s <= 4; ++s)
      rows.push_back({"cof_growth_" + std::to_string(i) + std::to_string(s), false});
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 2 * n; ++j)
      rows.push_back({"lr_growth_" + std::to_string(i) + "_" + std::to_string(j), false});

  return sweep(samples, lim, threads, rows, [&, n](const SectorSample& s, auto note) {
    const SymbolTable t = build_symbol_table(s.pt, fp);
    const double S = scale_S(t);
    const double At = t.A_tilde;
    std::size_t row = 0;
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 4; ++c)
        note(row++, std::abs(t.cofactor[i][c]) / std::pow(S, kCofPow[i][c]));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2 * n; ++j) {
        // sum_s Cof_is R_sj = det L * a_ij; rows 2, 4 carry one power less.
        const bool light = (i == 1 || i == 3);
        double w;
        if (j == 2 * n - 1)
          w = light ? S * S * S : S * S * S * S;
        else if (j < n)
          w = light ? At * S : At * S * S;
        else
          w = light ? At * S * S : At * S * S * S;
        note(row++, std::abs(t.a[i][j] * t.detL_direct) / w);
      }
  });
}

BoundReport check_detL_lower(const std::vector<SectorSample>& samples,
                             const FluidParams& fp, const CertifyLimits& lim,
                             int threads) {
  const std::vector<RowSpec> rows = {{"lemma53_detL_floor", true}};
  auto reports = sweep(samples, lim, threads, rows, [&](const SectorSample& s, auto note) {
    const SymbolTable t = build_symbol_table(s.pt, fp);
    const double S = scale_S(t);
    note(0, std::abs(t.detL_direct) / (S * S * S));
  });
  return reports.front();
}

std::vector<BoundReport> check_symbol_estimate(const std::vector<SectorSample>& samples,
                                               const FluidParams& fp,
                                               const CertifyLimits& lim, int threads) {
  std::vector<RowSpec> rows;
  for (int v = 1; v <= 6; ++v)
    rows.push_back({"symbol_Su_v" + std::to_string(v) + "_ceil", false});
  for (int v = 1; v <= 6; ++v)
    rows.push_back({"symbol_Stheta_v" + std::to_string(v) + "_ceil", false});
  rows.push_back({"symbol_Stheta_omega_replacement_ceil", false});

  return sweep(samples, lim, threads, rows, [&](const SectorSample& s, auto note) {
    const SymbolTable t = build_symbol_table(s.pt, fp);
    const int n = t.n, nt = n - 1;
    const double absl = std::abs(t.lambda);
    const double sq = std::sqrt(absl), At = t.A_tilde;
    // |xi_l| factors in the weights are enveloped by A~ >= |xi_l|.
    const double w0 = absl + sq * At + At * At, w1 = sq + At;
    for (Side side : {Side::plus, Side::minus}) {
      SymbolRequest r;
      r.side = side;
      r.x_n = sign_of(side) * s.x_n;
      for (int v = 1; v <= 6; ++v) {
        const int m_count = (v == 2 || v == 6) ? nt : 1;
        for (int k = 0; k < n; ++k) {
          for (int m = 0; m < m_count; ++m) {
            r.k = k;
            r.m_index = m;
            for (int j = 0; j < n; ++j) {
              r.j = j;
              r.deriv = 0;
              const cd s0 = s_family_symbol(SymbolKind::S_u_family, v, r, t);
              r.deriv = 1;
              const cd s1 = s_family_symbol(SymbolKind::S_u_family, v, r, t);
              r.deriv = 2;
              const cd s2 = s_family_symbol(SymbolKind::S_u_family, v, r, t);
              note(static_cast<std::size_t>(v - 1),
                   (w0 * std::abs(s0) + w1 * std::abs(s1) + std::abs(s2)) * s.x_n);
            }
            if (v == 5 && k == n - 1) continue;  // excluded omega_{n,+-} member
            r.j = 0;
            r.deriv = 0;
            const cd p0 = s_family_symbol(SymbolKind::S_theta_family, v, r, t);
            r.deriv = 1;
            const cd p1 = s_family_symbol(SymbolKind::S_theta_family, v, r, t);
            note(static_cast<std::size_t>(5 + v),
                 (At * std::abs(p0) + std::abs(p1)) * s.x_n);
          }
        }
      }
      // Replacement weighting for the excluded member: A B^{-2} omega_{n,+-}.
      const cd B = t.B(side);
      const cd pref = t.A / (B * B);
      const cd oc = omega_coef(t, n - 1, side);
      const Basis b = eval_basis(t, side, r.x_n);
      note(12, (At * std::abs(pref * oc * b.eA[0]) + std::abs(pref * oc * b.eA[1])) *
                   s.x_n);
    }
  });
}

std::vector<BoundReport> check_lopatinskii_lower(const std::vector<SectorSample>& samples,
                                                 const FluidParams& fp,
                                                 const CertifyLimits& lim, int threads) {
  if (!(fp.c_sigma > 0.0) || !(fp.c_g > 0.0))
    throw std::invalid_argument(
        "check_lopatinskii_lower: requires c_sigma > 0 and c_g > 0");
  const std::vector<RowSpec> rows = {{"sec6_lopatinskii_floor", true},
                                     {"sec6_detL_over_L_ceil", false}};
  return sweep(samples, lim, threads, rows, [&](const SectorSample& s, auto note) {
    const SymbolTable t = build_symbol_table(s.pt, fp);
    const double S = scale_S(t);
    const double scale = (std::abs(t.lambda) + t.A_tilde) * S * S * S;
    note(0, std::abs(t.lopatinskii) / scale);
    note(1, (std::abs(t.lambda) + t.A_tilde) *
                std::abs(t.detL_direct / t.lopatinskii));
  });
}

std::vector<BoundReport> check_appendixA(const std::vector<SectorSample>& samples,
                                         const FluidParams& fp,
                                         const CertifyLimits& lim, int threads) {
  const std::vector<RowSpec> rows = {{"appendixA_sup_ceil", false},
                                     {"helmholtz_resolvent_ceil", false}};
  return sweep(samples, lim, threads, rows, [&](const SectorSample& s, auto note) {
    const int n = s.pt.dim, nt = n - 1;
    cd xif[3]{};
    for (int j = 0; j < nt; ++j) xif[j] = s.pt.xi[static_cast<std::size_t>(j)];
    xif[n - 1] = s.xi_n;
    cd xi2{};
    for (int j = 0; j < n; ++j) xi2 += xif[j] * xif[j];
    for (Side side : {Side::plus, Side::minus}) {
      for (int k = 0; k < n; ++k)
        note(0, std::abs(appendixA_symbol(xif, n, s.pt.lambda, fp, k, side)));
      note(1, std::abs(s.pt.lambda) /
                  std::abs(fp.rho(side) * s.pt.lambda + fp.mu(side) * xi2));
    }
  });
}

BoundReport check_negative_control(const SectorSampling& cfg, std::uint64_t seed,
                                   const FluidParams& fp, int threads) {
  const CertifyLimits wide{kInf, 0.0};  // stages themselves never gate
  const std::vector<RowSpec> rows = {{"negative_control_omega_unweighted", false}};
  const auto stage = [&](const SectorSampling& c) {
    const auto samples = sample_sectors(c, seed);
    return sweep(samples, wide, threads, rows,
                 [&](const SectorSample& s, auto note) {
                   const SymbolTable t = build_symbol_table(s.pt, fp);
                   const double At = t.A_tilde;
                   for (Side side : {Side::plus, Side::minus}) {
                     const auto [f0, f1] =
                         unweighted_omega_member(t, side, sign_of(side) * s.x_n);
                     note(0, (At * std::abs(f0) + std::abs(f1)) * s.x_n);
                   }
                 })
        .front();
  };

  const BoundReport base = stage(cfg);
  SectorSampling shrunk = cfg;
  shrunk.xi_radius_range[1] = cfg.xi_radius_range[0];
  shrunk.xi_radius_range[0] = cfg.xi_radius_range[0] / 100.0;
  // The unweighted member decays on the scale x ~ 1/A~, so the probe must let
  // x_n follow the shrinking radii or the sup saturates at the old x ceiling.
  shrunk.xn_range[1] = cfg.xn_range[1] * 100.0;
  const BoundReport ext = stage(shrunk);

  BoundReport rep = ext;  // witness from the small-A~ stage
  rep.bound_id = rows.front().id;
  rep.samples = base.samples + ext.samples;
  rep.worst_ratio = ext.worst_ratio / base.worst_ratio;  // growth factor
  rep.is_floor = false;
  // pass means "diverges as designed": shrinking the tangential radii by 100x
  // must grow the sup markedly, in contrast to the certified rows whose sups
  // are stable under the same window move.
  rep.pass = std::isfinite(rep.worst_ratio) && rep.worst_ratio >= 4.0;
  return rep;
}

std::vector<BoundReport> run_all_checks(const SectorSampling& cfg, std::uint64_t seed,
                                        const FluidParams& fp, const CertifyLimits& lim,
                                        int threads) {
  cfg.validate();
  fp.validate();
  const std::vector<SectorSample> samples = sample_sectors(cfg, seed);

  std::vector<BoundReport> out;
  const auto append = [&out](std::vector<BoundReport> v) {
    for (auto& r : v) out.push_back(std::move(r));
  };
  append(check_root_bounds(samples, fp, lim, threads));
  append(check_cofactor_growth(samples, fp, lim, threads));
  out.push_back(check_detL_lower(samples, fp, lim, threads));
  append(check_symbol_estimate(samples, fp, lim, threads));
  if (cfg.gamma0 >= 1.0 && fp.c_sigma > 0.0 && fp.c_g > 0.0)
    append(check_lopatinskii_lower(samples, fp, lim, threads));
  append(check_appendixA(samples, fp, lim, threads));
  out.push_back(check_negative_control(cfg, seed, fp, threads));
  return out;
}

}  // namespace stokes2p
