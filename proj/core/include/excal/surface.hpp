#pragma once

// Elementary surfaces S = g(N x {0}), commuting transversal flows, tube
// measures sigma_r, the r -> 0 surface measure, q-connected lifts, and the
// tube-limit identity for the surface divergence.
//
// Tube integrals are computed by the change of variables
// psi(t, s) = Phi_t(g(s, 0)) over B_r x A_param, with D psi from the
// variational equation, so the r -> 0 limit is deterministic rather than
// sampled.

#include <Eigen/Dense>

#include "excal/diver.hpp"

namespace excal {

struct StraighteningMap {
  int dim = 0;    // ambient n
  int codim = 0;  // m
  // forward: chart (s0..s_{q-1}, t0..t_{m-1}) -> ambient point, q = n - m;
  // inverse: ambient point -> chart, both given as expressions.
  std::vector<Expression> forward;
  std::vector<Expression> inverse;
  ChartDomain chart_box;  // (s, t) box

  int surface_dim() const { return dim - codim; }
  std::vector<double> map_chart(std::span<const double> st) const;
  std::vector<double> map(std::span<const double> s, std::span<const double> t) const;
  std::vector<double> inverse_map(std::span<const double> x) const;
  /// D g at a chart point; column j is d(g)/d(chart_j).
  Eigen::MatrixXd jacobian(std::span<const double> st) const;
  /// Round-trip and nonsingularity checks on a sample grid.
  void self_check(int grid = 4, double tol = 1e-8) const;
};

struct ElementarySurface {
  StraighteningMap chart;
  // Parameter box selecting A subset of S; its margin realizes S_{-eps} as
  // a parameter-box shrink.
  ChartDomain param_box;
  double epsilon = 0.0;

  std::vector<double> point(std::span<const double> s) const;
  /// Columns: tangent frame d g / d s_i at (s, 0).
  Eigen::MatrixXd tangent_frame(std::span<const double> s) const;
};

struct TransversalSystem {
  std::vector<VectorField> fields;  // Y_1..Y_m on the tube chart
  DifferentialForm alpha;           // associated m-form
  double delta = 1e-8;              // strict-transversality floor

  /// alpha = h(tau(x)) dtau_1 ^ ... ^ dtau_m built from the straightening;
  /// closed by construction. h is an expression over the m t-variables.
  static DifferentialForm associated_form(const StraighteningMap& chart,
                                          const Expression& h_of_t,
                                          const ChartDomain& ambient);

  /// Pairwise commutation, strict transversality on S_{-eps} samples, and
  /// the associated-subspace property at surface samples. Throws on
  /// violation, naming the witness.
  void validate(const ElementarySurface& surface, int samples_per_axis = 5,
                double commute_tol = 1e-8) const;
};

struct FlowEngine {
  double step = 1e-3;
  long max_steps = 10000000;
  ChartDomain bounds;  // trajectories must stay inside

  std::vector<double> flow_one(const VectorField& y, double t,
                               std::vector<double> x) const;
  /// Composed flow Phi_t = Phi_{t_1}^{Y_1} ... Phi_{t_m}^{Y_m}
  /// (rightmost factor applied first).
  std::vector<double> flow(const std::vector<VectorField>& ys, std::span<const double> t,
                           std::vector<double> x) const;
  /// Composed flow together with D_x Phi_t from the variational equation.
  std::pair<std::vector<double>, Eigen::MatrixXd> flow_jacobian(
      const std::vector<VectorField>& ys, std::span<const double> t,
      std::vector<double> x) const;
};

struct SurfaceSetup {
  ElementarySurface surface;
  TransversalSystem system;
  FlowEngine engine;
  VolumeStructure volume;  // ambient density on the tube chart
  QuadratureSpec quad;
  // Ball quadrature resolution for the flow parameters.
  int ball_radial_nodes = 16;
  int ball_angular_nodes = 32;
};

/// psi(t, s) with optional D psi (columns: q s-derivatives then m
/// t-derivatives). Throws on singular Jacobian.
struct TubePoint {
  std::vector<double> x;
  Eigen::MatrixXd dpsi;
};
TubePoint tube_point(const SurfaceSetup& setup, std::span<const double> t,
                     std::span<const double> s, bool with_jacobian);

/// mu(Phi_{B_r} A) by the change-of-variables integral.
IntegralResult tube_measure(const SurfaceSetup& setup, double r);

struct SurfaceMeasureReport {
  std::vector<double> radii;
  std::vector<double> sigma_r;
  std::vector<double> sigma_err;
  double sigma_extrapolated = 0.0;
  double sigma_direct = 0.0;  // r = 0 Jacobian-integral oracle
  double observed_order = 0.0;
  bool monotone_ok = true;  // false: sequence not settling, no extrapolation
};

SurfaceMeasureReport surface_measure(const SurfaceSetup& setup,
                                     std::span<const double> radii);

/// Tube averages of u (ambient scalar field) against the surface-integral
/// oracle of the r -> 0 limit.
struct TubeAverageReport {
  std::vector<double> radii;
  std::vector<double> averages;
  double extrapolated = 0.0;
  double direct = 0.0;
  double observed_order = 0.0;
};
TubeAverageReport lemma3_average(const SurfaceSetup& setup, const ScalarField& u,
                                 std::span<const double> radii);

/// q-connected lift of a tangent field: value of Z-tilde at Phi_t(g(s,0)),
/// i.e. D_x Phi_t applied to Z(g(s,0)).
std::vector<double> q_connected_lift(const SurfaceSetup& setup, const VectorField& z,
                                     std::span<const double> t,
                                     std::span<const double> s);

/// Chart components of a tangent field: solves D g(s,0) c = Z(g(s,0)) and
/// checks the transversal part vanishes (tangency).
std::vector<double> chart_components(const SurfaceSetup& setup, const VectorField& z,
                                     std::span<const double> s, double tangency_tol = 1e-8);

struct Theorem2Report {
  double lhs = 0.0;  // int u div_S Z dsigma, via the surface-density oracle
  std::vector<double> radii;
  std::vector<double> rhs_r;
  double rhs_extrapolated = 0.0;
  double difference = 0.0;
  double observed_order = 0.0;
  double max_abs_div_lift = 0.0;  // sampled evidence for the L_inf hypothesis
};

/// Tube-limit identity for the surface divergence: u is a bounded function
/// on the surface, given as an expression over the q = n - m parameters.
Theorem2Report theorem2_check(const SurfaceSetup& setup, const VectorField& z,
                              const Expression& u_of_s, std::span<const double> radii);

/// Restriction identity with a closed associated form: div_S Z versus the
/// divergence of the lift taken with respect to beta = Omega-tilde ^ alpha.
/// Requires the transversal fields to be the straightening-chart flows
/// (verified on samples); surface_density is an expression over the s
/// parameters, h_of_t over the m t-variables.
IdentityReport restriction_check(const SurfaceSetup& setup, const VectorField& z,
                                 const Expression& surface_density,
                                 const Expression& h_of_t, int samples);

/// Extrapolation of a sequence v(r) -> v(0) assuming an r^2 leading error
/// (Neville in r^2).
double extrapolate_r2(std::span<const double> radii, std::span<const double> values);

/// Observed convergence order from the leading differences; large when the
/// sequence is flat to noise.
double observed_order(std::span<const double> radii, std::span<const double> values,
                      double noise = 1e-12);

}  // namespace excal
