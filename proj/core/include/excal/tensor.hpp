#pragma once

// Pointwise alternating-tensor algebra: wedge, the natural pairing, both
// interior products, and the volume-form flat/sharp correspondence.
//
// Conventions (pinned by tests):
//  - components over sorted multi-indices, lexicographic order;
//  - pairing <dx^I, e_J> = delta_IJ, so <omega, X> = sum_I omega_I X^I;
//  - i_{X1^...^Xm} = i_{Xm} ... i_{X1} (contraction order is normative).

#include <span>
#include <vector>

#include "excal/multiindex.hpp"

namespace excal {

enum class Variance { Vector, Covector };

class AltTensor {
public:
  AltTensor() = default;
  AltTensor(int dim, int grade, Variance var)
      : dim_(dim), grade_(grade), var_(var),
        comps_(static_cast<std::size_t>(binomial(dim, grade)), 0.0) {}

  static AltTensor scalar(int dim, Variance var, double value);
  /// Basis k-vector e_I (or basis k-form dx^I for Covector variance).
  static AltTensor basis(int dim, const MultiIndex& mi, Variance var);
  /// Grade-1 tensor from plain components.
  static AltTensor from_vector(std::span<const double> comps, Variance var);

  int dim() const { return dim_; }
  int grade() const { return grade_; }
  Variance variance() const { return var_; }
  std::span<const double> components() const { return comps_; }
  std::span<double> components() { return comps_; }

  double operator[](const MultiIndex& mi) const {
    return comps_[static_cast<std::size_t>(mi_rank(mi, dim_))];
  }
  double& operator[](const MultiIndex& mi) {
    return comps_[static_cast<std::size_t>(mi_rank(mi, dim_))];
  }

  double norm() const;          // Euclidean norm of the component vector
  bool is_zero(double tol = 0.0) const;

  AltTensor& operator+=(const AltTensor& o);
  AltTensor& operator*=(double c);

  friend AltTensor operator+(AltTensor a, const AltTensor& b) { return a += b; }
  friend AltTensor operator*(AltTensor a, double c) { return a *= c; }
  friend AltTensor operator*(double c, AltTensor a) { return a *= c; }
  friend AltTensor operator-(const AltTensor& a) {
    AltTensor r = a;
    return r *= -1.0;
  }
  friend AltTensor operator-(AltTensor a, const AltTensor& b) {
    AltTensor nb = b;
    nb *= -1.0;
    return a += nb;
  }

private:
  int dim_ = 0;
  int grade_ = 0;
  Variance var_ = Variance::Vector;
  std::vector<double> comps_;
};

/// a ^ b, same variance; zero tensor when grades sum past the dimension.
AltTensor wedge(const AltTensor& a, const AltTensor& b);

/// Natural pairing <omega, X> of a k-form with a k-vector.
double pair(const AltTensor& omega, const AltTensor& x);

/// i_X omega: k-form contracted by an m-vector to a (k-m)-form; zero when
/// m > k. Satisfies <i_X omega, Z> = <omega, X ^ Z>.
AltTensor interior_by_multivector(const AltTensor& omega, const AltTensor& x);

/// j_omega X: m-vector contracted by a k-form to an (m-k)-vector; zero when
/// k > m. Satisfies <eta, j_omega X> = <omega ^ eta, X>.
AltTensor interior_by_form(const AltTensor& omega, const AltTensor& x);

/// i_X Omega with Omega = rho dx^0 ^ ... ^ dx^(n-1): grade-k vector to
/// grade-(n-k) form.
AltTensor omega_flat(const AltTensor& x, double rho);

/// Inverse of omega_flat: omega_sharp(omega_flat(X, rho), rho) == X.
AltTensor omega_sharp(const AltTensor& eta, double rho);

}  // namespace excal
