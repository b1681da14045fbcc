#pragma once

// The divergence operators induced by a volume structure, plus residual
// checkers for the algebraic identities they satisfy. div_strong (through
// the flat/sharp route) is normative; div_recursive is an independent
// second implementation kept as a cross-check.

#include <optional>
#include <string>
#include <vector>

#include "excal/fields.hpp"
#include "excal/quad.hpp"

namespace excal {

/// Density rho > 0 on the domain, inducing the volume form
/// Omega = rho dx^0 ^ ... ^ dx^(n-1) and the measure mu = rho * Lebesgue.
class VolumeStructure {
public:
  VolumeStructure() = default;
  explicit VolumeStructure(ScalarField rho, int check_grid = 5);

  const ScalarField& density() const { return rho_; }
  const Expression& density_expr() const { return rho_.expr(); }
  const ChartDomain& domain() const { return rho_.domain(); }
  double density_at(std::span<const double> p) const { return rho_.value(p); }
  /// Omega at a point, as an n-form tensor.
  AltTensor volume_form_at(std::span<const double> p) const;

private:
  ScalarField rho_;
};

struct IdentityReport {
  std::string name;
  int samples = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double scale = 0.0;               // worst-point term magnitude
  std::vector<double> worst_point;
};

/// div X as an expression: (1/rho) sum_i d(rho X^i)/dx_i.
Expression div_vector(const VectorField& x, const VolumeStructure& vs);

/// i_{div Z} Omega = (-1)^(k-1) d i_Z Omega, solved by sharp.
MultiVectorField div_strong(const MultiVectorField& z, const VolumeStructure& vs);

/// Same operator through the recursion
/// div(X ^ Z) = div X * Z - X ^ div Z + L_X Z, base case div_vector.
MultiVectorField div_recursive(const MultiVectorField& z, const VolumeStructure& vs);

/// The flat of a multivector field, i_Z Omega, as an (n-k)-form with
/// expression components.
DifferentialForm flat_form(const MultiVectorField& z, const VolumeStructure& vs);

/// j_omega Z at the field level, with expression components.
MultiVectorField interior_by_form_field(const DifferentialForm& omega,
                                        const MultiVectorField& z);

using PointSet = std::vector<std::vector<double>>;

/// omega ^ i_Z Omega = <omega, Z> Omega.
IdentityReport check_lemma1(const DifferentialForm& omega, const MultiVectorField& z,
                            const VolumeStructure& vs, const PointSet& points);

/// i_{j(omega) X} Omega = (-1)^{k(m+1)} omega ^ i_X Omega.
IdentityReport check_aux(const DifferentialForm& omega, const MultiVectorField& x,
                         const VolumeStructure& vs, const PointSet& points);

/// div(j(omega) Z) = (-1)^k j(d omega) Z + (-1)^k j(omega) div Z, k < m.
IdentityReport check_leibniz_j(const DifferentialForm& omega, const MultiVectorField& z,
                               const VolumeStructure& vs, const PointSet& points);

/// Max-residual of div_strong vs div_recursive over the point set.
IdentityReport check_operator_agreement(const MultiVectorField& z,
                                        const VolumeStructure& vs,
                                        const PointSet& points);

struct WeakDivResult {
  double residual = 0.0;       // |int <d omega, Z> dmu + int <omega, W> dmu|
  double error_estimate = 0.0; // combined quadrature error
  double scale = 0.0;          // |int <d omega, Z> dmu| + 1
};

/// Weak-divergence residual for a candidate W against the test form omega
/// (grade k-1, compactly supported in the interior). When the test form is
/// bump-built, pass its support ball: the integrals then run in spherical
/// coordinates over the ball, where the integrand is smooth.
WeakDivResult weak_div_residual(const MultiVectorField& z, const MultiVectorField& w,
                                const DifferentialForm& omega, const VolumeStructure& vs,
                                const QuadratureSpec& q,
                                const std::optional<Bump>& support = std::nullopt);

}  // namespace excal
