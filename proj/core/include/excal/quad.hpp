#pragma once

// Integration over chart boxes: composite Gauss-Legendre tensor grids and
// seeded Monte Carlo, both deterministic, both returning an error
// estimate. Also the C^1 bump constructors for compactly supported test
// forms.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "excal/fields.hpp"

namespace excal {

struct QuadratureSpec {
  enum class Mode { TensorGrid, MonteCarlo };
  Mode mode = Mode::TensorGrid;
  int nodes_per_axis = 32;
  int panels = 1;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;  // embedded estimate (grid) or standard error (MC)
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

using ScalarFn = std::function<double(std::span<const double>)>;

/// Integral of f over the box (plain Lebesgue; multiply by a density
/// inside f for measure integrals).
IntegralResult integrate(const ScalarFn& f, const ChartDomain& box,
                         const QuadratureSpec& q);

/// 1-d composite Gauss integral over [a, b].
IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                            int nodes, int panels = 1);

/// Lebesgue volume of the m-ball of radius r.
double ball_volume(int m, double r);

/// Quadrature nodes and weights covering the m-ball of radius r (centered
/// at the origin); weights sum to ball_volume(m, r). Gauss in the radius,
/// Gauss in the polar angles, uniform in the periodic angle.
void ball_quadrature(int m, double r, int radial_nodes, int angular_nodes,
                     std::vector<std::vector<double>>& nodes,
                     std::vector<double>& weights);

/// Integral of f over a ball. Spectrally accurate when f is smooth inside
/// the ball (the right tool for bump-supported integrands, where a box
/// grid stalls on the C^1 seam). Error estimate from a half-resolution
/// pass.
IntegralResult integrate_ball(const ScalarFn& f, std::span<const double> center,
                              double radius, int radial_nodes, int angular_nodes);

struct Bump {
  std::vector<double> center;
  double radius = 1.0;

  /// (pospart(1 - |x-c|^2/r^2))^2: value and gradient vanish outside the
  /// ball, C^1 across the seam, 1 at the center.
  Expression expression(int dim) const;
};

/// Grade-k form whose selected components are the bump; every component
/// and its exterior derivative vanish outside the ball. The ball
/// (inflated by 1e-9) must sit strictly inside the domain box.
DifferentialForm make_bump_form(int grade, const std::vector<double>& center,
                                double radius, const std::vector<MultiIndex>& selected,
                                const ChartDomain& domain);

}  // namespace excal
