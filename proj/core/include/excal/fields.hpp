#pragma once

// Fields of alternating tensors over a box-shaped chart domain. Vector
// fields and forms carry expression components; multivector fields keep a
// decomposable term list plus a componentwise expression view, and the two
// must agree at every point (asserted by tests, relied on by the
// divergence operators).

#include <span>
#include <string>
#include <vector>

#include "excal/expr.hpp"
#include "excal/tensor.hpp"

namespace excal {

struct ChartDomain {
  int dim = 0;
  std::vector<double> lo, hi;
  double margin = 0.0;

  ChartDomain() = default;
  ChartDomain(std::vector<double> lo_, std::vector<double> hi_, double margin_ = 0.0);

  bool contains(std::span<const double> p, double slack = 0.0) const;
  void require_inside(std::span<const double> p) const;
  /// Domain shrunk by the margin on every axis.
  ChartDomain inner() const;
  double volume() const;
};

class ScalarField {
public:
  ScalarField() = default;
  ScalarField(Expression expr, ChartDomain domain);

  const Expression& expr() const { return expr_; }
  const ChartDomain& domain() const { return dom_; }
  double value(std::span<const double> p) const;
  std::pair<double, std::vector<double>> value_grad(std::span<const double> p) const;

private:
  Expression expr_;
  ChartDomain dom_;
};

class VectorField {
public:
  VectorField() = default;
  VectorField(std::vector<Expression> comps, ChartDomain domain);

  static VectorField basis(int i, const ChartDomain& domain);
  static VectorField parse(const std::vector<std::string>& comps, const ChartDomain& domain);

  int dim() const { return dom_.dim; }
  const ChartDomain& domain() const { return dom_; }
  const Expression& component(int i) const { return comps_[static_cast<std::size_t>(i)]; }
  AltTensor at(std::span<const double> p) const;
  std::vector<double> values(std::span<const double> p) const;
  /// Jacobian row i, column j = d X^i / d x_j.
  std::vector<std::vector<double>> jacobian(std::span<const double> p) const;

private:
  std::vector<Expression> comps_;
  ChartDomain dom_;
};

class DifferentialForm {
public:
  DifferentialForm() = default;
  DifferentialForm(int grade, std::vector<Expression> comps, ChartDomain domain);

  static DifferentialForm zero(int grade, const ChartDomain& domain);
  static DifferentialForm scalar(Expression f, const ChartDomain& domain);

  int grade() const { return grade_; }
  int dim() const { return dom_.dim; }
  const ChartDomain& domain() const { return dom_; }
  const Expression& component(std::size_t rank) const { return comps_[rank]; }
  Expression& component(std::size_t rank) { return comps_[rank]; }
  std::size_t component_count() const { return comps_.size(); }
  AltTensor at(std::span<const double> p) const;

private:
  int grade_ = 0;
  std::vector<Expression> comps_;
  ChartDomain dom_;
};

class MultiVectorField {
public:
  struct Term {
    Expression coeff;
    std::vector<VectorField> factors;
  };

  MultiVectorField() = default;
  MultiVectorField(int grade, std::vector<Term> terms, ChartDomain domain);

  static MultiVectorField from_components(int grade, std::vector<Expression> comps,
                                          const ChartDomain& domain);
  static MultiVectorField decomposable(Expression coeff, std::vector<VectorField> factors,
                                       const ChartDomain& domain);

  int grade() const { return grade_; }
  int dim() const { return dom_.dim; }
  const ChartDomain& domain() const { return dom_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Evaluation through the decomposable term list.
  AltTensor at(std::span<const double> p) const;
  /// Evaluation through the expanded component expressions.
  AltTensor at_components(std::span<const double> p) const;
  /// Expanded component expression at the given multi-index rank.
  const Expression& component(std::size_t rank) const { return comps_[rank]; }

private:
  void expand_components();

  int grade_ = 0;
  std::vector<Term> terms_;
  std::vector<Expression> comps_;
  ChartDomain dom_;
};

DifferentialForm exterior_derivative(const DifferentialForm& omega);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

VectorField lie_bracket(const VectorField& x, const VectorField& y);
MultiVectorField lie_derivative(const VectorField& x, const MultiVectorField& z);
MultiVectorField wedge(const VectorField& x, const MultiVectorField& z);
MultiVectorField scale(const Expression& f, const MultiVectorField& z);
MultiVectorField add(const MultiVectorField& a, const MultiVectorField& b);

/// X f = sum_i X^i df/dx_i as an expression.
Expression directional_derivative(const VectorField& x, const Expression& f);

}  // namespace excal
