// types.hpp
//
// Shared scalar/parameter types for the two-phase Stokes spectral solver.
//
// Geometry and conventions used throughout:
//   * upper phase occupies x_n > 0 ("plus"), lower phase x_n < 0 ("minus");
//   * the interface normal is nu = (0, ..., 0, -1);
//   * the jump bracket [[f]] is the upper trace minus the lower trace;
//   * lambda is the resolvent parameter in a sector
//       Sigma_{eps,gamma} = { lambda != 0 : |arg lambda| < pi - eps, |lambda| >= gamma };
//   * tangential frequencies xi_j may be complexified into the double lobe
//       SigmaTilde_eta = { z != 0 : |arg z| < eta } u { z != 0 : pi - |arg z| < eta }.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace stokes2p {

using cd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

enum class Side : int { plus = +1, minus = -1 };

inline int sign_of(Side s) { return static_cast<int>(s); }

// Physical constants of the two phases plus the interface coefficients.
struct FluidParams {
  double rho_plus = 1.0;
  double rho_minus = 1.0;
  double mu_plus = 1.0;
  double mu_minus = 1.0;
  double c_sigma = 0.0;  // surface tension coefficient, >= 0
  double c_g = 0.0;      // gravity coefficient, >= 0

  double rho(Side s) const { return s == Side::plus ? rho_plus : rho_minus; }
  double mu(Side s) const { return s == Side::plus ? mu_plus : mu_minus; }
  double jump_rho() const { return rho_plus - rho_minus; }

  void validate() const {
    if (!(rho_plus > 0 && rho_minus > 0 && mu_plus > 0 && mu_minus > 0))
      throw std::invalid_argument("FluidParams: densities and viscosities must be positive");
    if (c_sigma < 0 || c_g < 0)
      throw std::invalid_argument("FluidParams: c_sigma and c_g must be nonnegative");
  }
};

// One resolvent/frequency sample point.  dim is the ambient dimension n
// (2 or 3 supported); xi holds the n-1 tangential frequencies.
struct SpectralPoint {
  cd lambda{};
  std::array<cd, 2> xi{};  // xi[0..dim-2] used
  int dim = 2;

  int nxi() const { return dim - 1; }
};

// Sector membership predicates (open sector shrunk by an angular margin).
inline bool in_lambda_sector(cd lambda, double epsilon, double gamma, double margin = 0.0) {
  if (lambda == cd(0.0)) return false;
  const double a = std::abs(std::arg(lambda));
  return a <= pi - epsilon - margin && std::abs(lambda) >= gamma;
}

inline bool in_xi_lobes(cd z, double eta, double margin = 0.0) {
  if (z == cd(0.0)) return false;
  const double a = std::abs(std::arg(z));
  return a <= eta - margin || a >= pi - eta + margin;
}

}  // namespace stokes2p
