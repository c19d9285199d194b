// test_certifier.cpp -- sector sampling invariants and bound-check plumbing:
// samples stay inside the declared sector/lobes, sampling is seed-
// deterministic, and the chunked multi-thread sweep produces exactly the
// single-thread report.

#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "stokes2p/certifier.hpp"
#include "test_util.hpp"

using namespace stokes2p;
using namespace stokes2p::testutil;

namespace {

SectorSampling tiny(int n) {
  SectorSampling s;
  s.n = n;
  s.n_radii = 4;
  s.n_angles = 5;
  s.n_xn = 3;
  s.n_jitter = 40;
  return s;
}

}  // namespace

TEST_CASE("sample_sectors: counts, sector membership, ranges, determinism") {
  for (int n : {2, 3}) {
    const SectorSampling cfg = tiny(n);
    const std::vector<SectorSample> samples = sample_sectors(cfg, 77);
    CHECK(samples.size() == cfg.total());

    for (const SectorSample& s : samples) {
      CHECK(s.pt.dim == n);
      CHECK(in_lambda_sector(s.pt.lambda, cfg.epsilon, cfg.gamma0, cfg.margin));
      const double r = std::abs(s.pt.lambda);
      CHECK(r >= cfg.radius_range[0] * (1.0 - 1e-12));
      // jitter draws may exceed the grid radii only within the declared range
      CHECK(r <= (cfg.radius_range[1] + cfg.gamma0) * (1.0 + 1e-12));
      for (int d = 0; d < n - 1; ++d) {
        const cd z = s.pt.xi[static_cast<std::size_t>(d)];
        CHECK(in_xi_lobes(z, cfg.eta, cfg.margin));
        CHECK(std::abs(z) >= cfg.xi_radius_range[0] * (1.0 - 1e-12));
        CHECK(std::abs(z) <= cfg.xi_radius_range[1] * (1.0 + 1e-12));
      }
      CHECK(s.x_n >= cfg.xn_range[0] * (1.0 - 1e-12));
      CHECK(s.x_n <= cfg.xn_range[1] * (1.0 + 1e-12));
      CHECK(std::isfinite(s.xi_n.real()));
      CHECK(std::isfinite(s.xi_n.imag()));
    }

    const std::vector<SectorSample> again = sample_sectors(cfg, 77);
    REQUIRE(again.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      CHECK(again[i].pt.lambda == samples[i].pt.lambda);

    const std::vector<SectorSample> other = sample_sectors(cfg, 78);
    bool differs = false;
    for (std::size_t i = 0; i < samples.size(); ++i)
      differs = differs || other[i].pt.lambda != samples[i].pt.lambda;
    CHECK(differs);
  }
}

TEST_CASE("bound checks: multi-thread sweeps reproduce the single-thread "
          "report bit for bit") {
  const SectorSampling cfg = tiny(3);
  const std::vector<SectorSample> samples = sample_sectors(cfg, 13);
  // surface coefficients > 0 so the Lopatinskii floor check participates
  const FluidParams fp = hand_params(1.0, 0.5);
  const CertifyLimits lim;

  using CheckFn = std::function<std::vector<BoundReport>(
      const std::vector<SectorSample>&, const FluidParams&, const CertifyLimits&, int)>;
  const std::vector<CheckFn> checks = {
      check_root_bounds, check_cofactor_growth,
      [](const std::vector<SectorSample>& s, const FluidParams& f,
         const CertifyLimits& l, int t) {
        return std::vector<BoundReport>{check_detL_lower(s, f, l, t)};
      },
      check_symbol_estimate, check_lopatinskii_lower, check_appendixA};
  const auto run = [&](int threads) {
    std::vector<BoundReport> all;
    for (const auto& fn : checks) {
      const std::vector<BoundReport> part = fn(samples, fp, lim, threads);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  };

  const std::vector<BoundReport> one = run(1);
  const std::vector<BoundReport> four = run(4);
  REQUIRE(one.size() == four.size());
  CHECK(one.size() > 10);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].bound_id == four[i].bound_id);
    CHECK(one[i].worst_ratio == four[i].worst_ratio);
    CHECK(one[i].arg_worst.lambda == four[i].arg_worst.lambda);
    CHECK(std::isfinite(one[i].worst_ratio));
    CHECK(one[i].pass);
  }
}

TEST_CASE("negative control: the unweighted member's sup grows when the "
          "tangential window shrinks") {
  SectorSampling cfg = tiny(3);
  cfg.n_jitter = 60;
  const BoundReport rep = check_negative_control(cfg, 21, hand_params(), 2);
  CHECK(std::isfinite(rep.worst_ratio));
  CHECK(rep.pass);
  CHECK(rep.worst_ratio >= 4.0);
}
