// grids.hpp -- node generators and quadrature helpers shared by the solvers
// and the singular-operator harness.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stokes2p/types.hpp"

namespace stokes2p {

// N log-spaced values in [a, b], a, b > 0.
inline std::vector<double> log_space(double a, double b, int n) {
  if (!(a > 0.0) || !(b > 0.0) || n < 1)
    throw std::invalid_argument("log_space: need a, b > 0 and n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
  return out;
}

inline std::vector<double> lin_space(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("lin_space: n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return out;
}

// Staggered uniform vertical nodes on one side of the interface:
// x_m = sign * (m + 1/2) * h, m = 0..n-1, h = extent / n.  The stagger keeps
// nodes off the interface where one-sided formulas switch branches.
inline std::vector<double> staggered_nodes(double extent, int n, int sign) {
  if (!(extent > 0.0) || n < 1)
    throw std::invalid_argument("staggered_nodes: need extent > 0, n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double h = extent / n;
  for (int m = 0; m < n; ++m)
    out[static_cast<std::size_t>(m)] = sign * (m + 0.5) * h;
  return out;
}

// Composite trapezoid weight for uniform nodes including both endpoints.
inline double trapezoid_uniform(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

// 12-point Gauss-Legendre rule on [-1, 1] (abscissas/weights to 16 digits).
struct GaussLegendre12 {
  static constexpr int n = 12;
  static constexpr double x[12] = {
      -0.9815606342467192, -0.9041172563704748, -0.7699026741943047,
      -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
      0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
      0.7699026741943047,  0.9041172563704748,  0.9815606342467192};
  static constexpr double w[12] = {
      0.04717533638651183, 0.10693932599531843, 0.16007832854334622,
      0.20316742672306592, 0.23349253653835481, 0.24914704581340277,
      0.24914704581340277, 0.23349253653835481, 0.20316742672306592,
      0.16007832854334622, 0.10693932599531843, 0.04717533638651183};
};

// Panelized Gauss-Legendre nodes/weights on (0, edge_max]: a leading panel
// [0, e0] followed by geometrically growing panels up to edge_max.
struct PanelQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline PanelQuadrature panel_gauss(double e0, double edge_max, int n_panels) {
  if (!(e0 > 0.0) || !(edge_max > e0) || n_panels < 2)
    throw std::invalid_argument("panel_gauss: need 0 < e0 < edge_max, n_panels >= 2");
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(n_panels) + 1);
  edges.push_back(0.0);
  const double lr = std::log(edge_max / e0) / (n_panels - 1);
  for (int i = 0; i < n_panels; ++i) edges.push_back(e0 * std::exp(lr * i));
  PanelQuadrature q;
  q.nodes.reserve(static_cast<std::size_t>(n_panels) * GaussLegendre12::n);
  q.weights.reserve(q.nodes.capacity());
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < GaussLegendre12::n; ++i) {
      q.nodes.push_back(mid + half * GaussLegendre12::x[i]);
      q.weights.push_back(half * GaussLegendre12::w[i]);
    }
  }
  return q;
}

// Symmetric sinh-graded contour parameter grid: tau_m = tau_max *
// sinh(s_m) / sinh(s_max) with s_m uniform on [-s_max, s_max].  Clusters
// nodes near tau = 0 where the integrand peaks while reaching +-tau_max.
// `weight` carries the trapezoid weight in s times dtau/ds, so that
// sum_m f(tau_m) weight_m approximates the integral over tau.
struct SinhGrid {
  std::vector<double> tau;
  std::vector<double> weight;
};

inline SinhGrid sinh_grid(double tau_max, double s_max, int m) {
  if (!(tau_max > 0.0) || !(s_max > 0.0) || m < 3)
    throw std::invalid_argument("sinh_grid: need tau_max, s_max > 0 and m >= 3");
  SinhGrid g;
  g.tau.resize(static_cast<std::size_t>(m));
  g.weight.resize(static_cast<std::size_t>(m));
  const double denom = std::sinh(s_max);
  const double ds = 2.0 * s_max / (m - 1);
  for (int i = 0; i < m; ++i) {
    const double s = -s_max + ds * i;
    g.tau[static_cast<std::size_t>(i)] = tau_max * std::sinh(s) / denom;
    const double trap = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    g.weight[static_cast<std::size_t>(i)] = trap * ds * tau_max * std::cosh(s) / denom;
  }
  return g;
}

}  // namespace stokes2p
