// certifier.hpp -- sector sampling and empirical bound sweeps.
//
// Every check below evaluates a family of scale-weighted ratios over a
// seeded sample cloud in Sigma_{eps,gamma0} x Sigma~_eta^{n-1} x (0, X] and
// reports the worst value together with the witness point.  Constants are
// reported, never asserted against theoretical values; pass/fail uses
// configured ceilings and floors that only catch implementation blowups.
//
// Determinism contract: samples are generated single-threaded from the seed;
// sweeps reduce per fixed-size chunk with an ordered merge, so reports are
// bit-identical for any thread count.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stokes2p/symbols.hpp"
#include "stokes2p/types.hpp"

namespace stokes2p {

struct SectorSampling {
  int n = 3;                 // space dimension, 2 or 3
  double epsilon = pi / 4;   // lambda sector aperture parameter
  double eta = pi / 16;      // xi lobe half-angle
  double gamma0 = 1.0;       // |lambda| floor
  double margin = 1e-3;      // arg-distance kept inside open sector boundaries
  int n_radii = 10;
  int n_angles = 11;         // includes the extreme rays +-(pi - eps - margin)
  int n_xn = 8;
  int n_jitter = 9120;       // random extra samples on top of the product grid
  double radius_range[2] = {1.0, 1e3};    // |lambda|, log-spaced
  double xi_radius_range[2] = {5e-2, 2e1};  // |xi_j|, log-spaced
  double xn_range[2] = {1e-2, 1e1};       // x_n magnitudes, log-spaced

  std::size_t total() const {
    return static_cast<std::size_t>(n_radii) * n_angles * n_xn +
           static_cast<std::size_t>(n_jitter);
  }
  // Throws std::invalid_argument on violated invariants
  // (eta < min(pi/4, epsilon/2), positive ranges, n in {2, 3}, ...).
  void validate() const;
};

struct SectorSample {
  SpectralPoint pt;  // lambda and the n-1 tangential frequencies
  cd xi_n{};         // complexified normal frequency (Appendix-type sweeps)
  double x_n = 0.0;  // positive magnitude; checks evaluate both signs
};

struct CertifyLimits {
  double ratio_ceiling = 1e6;  // upper-bound rows fail above this
  double floor = 1e-6;         // lower-bound rows fail below this
};

struct BoundReport {
  std::string bound_id;
  int n = 0;
  std::size_t samples = 0;
  double worst_ratio = 0.0;  // sup for ceiling rows, inf for floor rows
  bool is_floor = false;
  SpectralPoint arg_worst{};
  cd worst_xi_n{};
  double worst_x_n = 0.0;
  bool pass = false;
};

// Deterministic product grid (lambda radius x lambda angle x x_n, seeded
// frequencies covering both lobes) plus seeded random jitter.
std::vector<SectorSample> sample_sectors(const SectorSampling& cfg, std::uint64_t seed);

// Root equivalences Re A ~ A~, Re B+- ~ |lambda|^{1/2} + A~, the
// mu+B+ + mu-B- denominator floor, and the x_n-weighted kernel decay rows
// for e^{-+Ax}, M_+-, e^{-+Bx} and their first three derivatives.
std::vector<BoundReport> check_root_bounds(const std::vector<SectorSample>& samples,
                                           const FluidParams& fp,
                                           const CertifyLimits& lim, int threads = 1);

// Cofactor growth |Cof_is| <= C (|lambda|^{1/2}+A~)^{p(i,s)} for all 16
// entries, plus the weighted |sum_s Cof_is R_sj| products for all 2n columns.
std::vector<BoundReport> check_cofactor_growth(const std::vector<SectorSample>& samples,
                                               const FluidParams& fp,
                                               const CertifyLimits& lim,
                                               int threads = 1);

// Determinant floor |det L| >= c (|lambda|^{1/2}+A~)^3.
BoundReport check_detL_lower(const std::vector<SectorSample>& samples,
                             const FluidParams& fp, const CertifyLimits& lim,
                             int threads = 1);

// The weighted S-family sup rows (six velocity variants, six pressure
// variants with the k = n omega member excluded from variant 5, plus the
// A B^{-2} omega_{n,+-} replacement row).
std::vector<BoundReport> check_symbol_estimate(const std::vector<SectorSample>& samples,
                                               const FluidParams& fp,
                                               const CertifyLimits& lim,
                                               int threads = 1);

// |L| >= c (|lambda|+A~)(|lambda|^{1/2}+A~)^3 plus the multiplier ceiling
// (|lambda|+A~) |det L / L| <= C.  Requires gamma0 >= 1, c_sigma, c_g > 0.
std::vector<BoundReport> check_lopatinskii_lower(const std::vector<SectorSample>& samples,
                                                 const FluidParams& fp,
                                                 const CertifyLimits& lim,
                                                 int threads = 1);

// Normal-component multiplier sup over the complexified full-frequency cloud,
// plus the resolvent multiplier |lambda| / |rho lambda + mu |xi|^2| ceiling.
std::vector<BoundReport> check_appendixA(const std::vector<SectorSample>& samples,
                                         const FluidParams& fp,
                                         const CertifyLimits& lim, int threads = 1);

// Negative control: the unweighted omega_{n,+-} member of pressure variant 5
// must NOT be uniformly bounded (expected growth (|lambda|^{1/2}+A~)^2/A~^2).
// Stage 1 takes the sup over a cloud built from `cfg`; stage 2 re-runs with
// the tangential radii shrunk by 100x and the x_n ceiling raised to follow
// the 1/A~ decay scale.  worst_ratio is the stage-2/stage-1 growth factor
// and pass = (growth >= 4), i.e. pass means "diverges as designed".
BoundReport check_negative_control(const SectorSampling& cfg, std::uint64_t seed,
                                   const FluidParams& fp, int threads = 1);

// All checks above in a fixed report order (root bounds, cofactor growth,
// det L floor, symbol estimate, Lopatinskii rows, Appendix rows, control).
std::vector<BoundReport> run_all_checks(const SectorSampling& cfg, std::uint64_t seed,
                                        const FluidParams& fp, const CertifyLimits& lim,
                                        int threads = 1);

}  // namespace stokes2p
