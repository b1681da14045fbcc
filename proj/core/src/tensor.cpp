#include "excal/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace excal {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

AltTensor AltTensor::scalar(int dim, Variance var, double value) {
  AltTensor t(dim, 0, var);
  t.comps_[0] = value;
  return t;
}

AltTensor AltTensor::basis(int dim, const MultiIndex& mi, Variance var) {
  AltTensor t(dim, static_cast<int>(mi.size()), var);
  t[mi] = 1.0;
  return t;
}

AltTensor AltTensor::from_vector(std::span<const double> comps, Variance var) {
  AltTensor t(static_cast<int>(comps.size()), 1, var);
  for (std::size_t i = 0; i < comps.size(); ++i) t.comps_[i] = comps[i];
  return t;
}

double AltTensor::norm() const {
  double s = 0.0;
  for (double c : comps_) s += c * c;
  return std::sqrt(s);
}

bool AltTensor::is_zero(double tol) const {
  for (double c : comps_)
    if (std::abs(c) > tol) return false;
  return true;
}

AltTensor& AltTensor::operator+=(const AltTensor& o) {
  require(dim_ == o.dim_ && grade_ == o.grade_ && var_ == o.var_,
          "tensor shape mismatch in addition");
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
  return *this;
}

AltTensor& AltTensor::operator*=(double c) {
  for (double& x : comps_) x *= c;
  return *this;
}

AltTensor wedge(const AltTensor& a, const AltTensor& b) {
  require(a.dim() == b.dim(), "wedge: dimension mismatch");
  require(a.variance() == b.variance(), "wedge: variance mismatch");
  int n = a.dim();
  AltTensor out(n, a.grade() + b.grade(), a.variance());
  if (a.grade() + b.grade() > n) return out;  // the zero space
  const auto& ais = multi_indices(n, a.grade());
  const auto& bis = multi_indices(n, b.grade());
  auto ac = a.components();
  auto bc = b.components();
  for (std::size_t i = 0; i < ais.size(); ++i) {
    if (ac[i] == 0.0) continue;
    for (std::size_t j = 0; j < bis.size(); ++j) {
      if (bc[j] == 0.0) continue;
      int s = merge_sign(ais[i], bis[j]);
      if (s == 0) continue;
      out[mi_union(ais[i], bis[j])] += s * ac[i] * bc[j];
    }
  }
  return out;
}

double pair(const AltTensor& omega, const AltTensor& x) {
  require(omega.variance() == Variance::Covector && x.variance() == Variance::Vector,
          "pair: expected (covector, vector)");
  require(omega.dim() == x.dim(), "pair: dimension mismatch");
  require(omega.grade() == x.grade(), "pair: grade mismatch");
  double s = 0.0;
  auto oc = omega.components();
  auto xc = x.components();
  for (std::size_t i = 0; i < oc.size(); ++i) s += oc[i] * xc[i];
  return s;
}

AltTensor interior_by_multivector(const AltTensor& omega, const AltTensor& x) {
  require(omega.variance() == Variance::Covector && x.variance() == Variance::Vector,
          "interior_by_multivector: expected (covector, vector)");
  require(omega.dim() == x.dim(), "interior_by_multivector: dimension mismatch");
  int n = omega.dim();
  int k = omega.grade(), m = x.grade();
  if (m > k) return AltTensor(n, k - m, Variance::Covector);  // the zero space
  AltTensor out(n, k - m, Variance::Covector);
  // (i_X omega)_J = sum_I sign(I, J) X^I omega_{I u J}, the adjunction made
  // componentwise; equals the iterated i_{Xm}...i_{X1} on decomposables.
  const auto& xis = multi_indices(n, m);
  const auto& jis = multi_indices(n, k - m);
  auto xc = x.components();
  for (std::size_t j = 0; j < jis.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xis.size(); ++i) {
      if (xc[i] == 0.0) continue;
      int s = merge_sign(xis[i], jis[j]);
      if (s == 0) continue;
      acc += s * xc[i] * omega[mi_union(xis[i], jis[j])];
    }
    out.components()[j] = acc;
  }
  return out;
}

AltTensor interior_by_form(const AltTensor& omega, const AltTensor& x) {
  require(omega.variance() == Variance::Covector && x.variance() == Variance::Vector,
          "interior_by_form: expected (covector, vector)");
  require(omega.dim() == x.dim(), "interior_by_form: dimension mismatch");
  int n = omega.dim();
  int k = omega.grade(), m = x.grade();
  if (k > m) return AltTensor(n, m - k, Variance::Vector);  // the zero space
  AltTensor out(n, m - k, Variance::Vector);
  // (j_omega X)^J = sum_I sign(I, J) omega_I X^{I u J}.
  const auto& ois = multi_indices(n, k);
  const auto& jis = multi_indices(n, m - k);
  auto oc = omega.components();
  for (std::size_t j = 0; j < jis.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ois.size(); ++i) {
      if (oc[i] == 0.0) continue;
      int s = merge_sign(ois[i], jis[j]);
      if (s == 0) continue;
      acc += s * oc[i] * x[mi_union(ois[i], jis[j])];
    }
    out.components()[j] = acc;
  }
  return out;
}

AltTensor omega_flat(const AltTensor& x, double rho) {
  require(x.variance() == Variance::Vector, "omega_flat: expected a vector");
  int n = x.dim();
  int k = x.grade();
  AltTensor out(n, n - k, Variance::Covector);
  const auto& xis = multi_indices(n, k);
  auto xc = x.components();
  for (std::size_t i = 0; i < xis.size(); ++i) {
    MultiIndex comp = mi_complement(xis[i], n);
    out[comp] = rho * merge_sign(xis[i], comp) * xc[i];
  }
  return out;
}

AltTensor omega_sharp(const AltTensor& eta, double rho) {
  require(eta.variance() == Variance::Covector, "omega_sharp: expected a covector");
  int n = eta.dim();
  int k = n - eta.grade();
  AltTensor out(n, k, Variance::Vector);
  const auto& xis = multi_indices(n, k);
  for (std::size_t i = 0; i < xis.size(); ++i) {
    MultiIndex comp = mi_complement(xis[i], n);
    out.components()[i] = eta[comp] / (rho * merge_sign(xis[i], comp));
  }
  return out;
}

}  // namespace excal
