#include "excal/fields.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace excal {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

int permutation_sign(std::span<const int> perm) {
  int inv = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inv;
  return inv % 2 == 0 ? 1 : -1;
}

}  // namespace

ChartDomain::ChartDomain(std::vector<double> lo_, std::vector<double> hi_, double margin_)
    : dim(static_cast<int>(lo_.size())), lo(std::move(lo_)), hi(std::move(hi_)),
      margin(margin_) {
  require(lo.size() == hi.size(), "domain bounds size mismatch");
  double shortest = 1e300;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    require(lo[i] < hi[i], "domain box has empty interior");
    shortest = std::min(shortest, hi[i] - lo[i]);
  }
  require(margin >= 0.0 && margin < shortest / 2.0, "margin too large for the box");
}

bool ChartDomain::contains(std::span<const double> p, double slack) const {
  if (static_cast<int>(p.size()) != dim) return false;
  for (int i = 0; i < dim; ++i) {
    std::size_t u = static_cast<std::size_t>(i);
    if (p[u] < lo[u] - slack || p[u] > hi[u] + slack) return false;
  }
  return true;
}

void ChartDomain::require_inside(std::span<const double> p) const {
  if (!contains(p, 1e-12)) throw EvalError("point outside chart domain");
}

ChartDomain ChartDomain::inner() const {
  std::vector<double> l = lo, h = hi;
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] += margin;
    h[i] -= margin;
  }
  return ChartDomain(std::move(l), std::move(h), 0.0);
}

double ChartDomain::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i)
    v *= hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
  return v;
}

ScalarField::ScalarField(Expression expr, ChartDomain domain)
    : expr_(std::move(expr)), dom_(std::move(domain)) {
  require(expr_.dimension() == dom_.dim, "scalar field dimension mismatch");
}

double ScalarField::value(std::span<const double> p) const {
  dom_.require_inside(p);
  return expr_.eval(p);
}

std::pair<double, std::vector<double>> ScalarField::value_grad(
    std::span<const double> p) const {
  dom_.require_inside(p);
  return expr_.eval_grad(p);
}

VectorField::VectorField(std::vector<Expression> comps, ChartDomain domain)
    : comps_(std::move(comps)), dom_(std::move(domain)) {
  require(static_cast<int>(comps_.size()) == dom_.dim, "vector field needs n components");
  for (const auto& c : comps_)
    require(c.dimension() == dom_.dim, "vector field component dimension mismatch");
}

VectorField VectorField::basis(int i, const ChartDomain& domain) {
  std::vector<Expression> comps;
  comps.reserve(static_cast<std::size_t>(domain.dim));
  for (int j = 0; j < domain.dim; ++j)
    comps.push_back(Expression::constant(j == i ? 1.0 : 0.0, domain.dim));
  return VectorField(std::move(comps), domain);
}

VectorField VectorField::parse(const std::vector<std::string>& comps,
                               const ChartDomain& domain) {
  std::vector<Expression> es;
  es.reserve(comps.size());
  for (const auto& s : comps) es.push_back(Expression::parse(s, domain.dim));
  return VectorField(std::move(es), domain);
}

AltTensor VectorField::at(std::span<const double> p) const {
  dom_.require_inside(p);
  std::vector<double> v = values(p);
  return AltTensor::from_vector(v, Variance::Vector);
}

std::vector<double> VectorField::values(std::span<const double> p) const {
  std::vector<double> v;
  v.reserve(comps_.size());
  for (const auto& c : comps_) v.push_back(c.eval(p));
  return v;
}

std::vector<std::vector<double>> VectorField::jacobian(std::span<const double> p) const {
  std::vector<std::vector<double>> j;
  j.reserve(comps_.size());
  for (const auto& c : comps_) j.push_back(c.eval_grad(p).second);
  return j;
}

DifferentialForm::DifferentialForm(int grade, std::vector<Expression> comps,
                                   ChartDomain domain)
    : grade_(grade), comps_(std::move(comps)), dom_(std::move(domain)) {
  require(static_cast<std::int64_t>(comps_.size()) == binomial(dom_.dim, grade_),
          "form component count must be C(n, k)");
}

DifferentialForm DifferentialForm::zero(int grade, const ChartDomain& domain) {
  std::vector<Expression> comps(
      static_cast<std::size_t>(binomial(domain.dim, grade)),
      Expression::constant(0.0, domain.dim));
  return DifferentialForm(grade, std::move(comps), domain);
}

DifferentialForm DifferentialForm::scalar(Expression f, const ChartDomain& domain) {
  std::vector<Expression> comps{std::move(f)};
  return DifferentialForm(0, std::move(comps), domain);
}

AltTensor DifferentialForm::at(std::span<const double> p) const {
  dom_.require_inside(p);
  AltTensor t(dom_.dim, grade_, Variance::Covector);
  for (std::size_t i = 0; i < comps_.size(); ++i)
    t.components()[i] = comps_[i].eval(p);
  return t;
}

MultiVectorField::MultiVectorField(int grade, std::vector<Term> terms, ChartDomain domain)
    : grade_(grade), terms_(std::move(terms)), dom_(std::move(domain)) {
  for (const auto& t : terms_) {
    require(static_cast<int>(t.factors.size()) == grade_,
            "term factor count must equal the grade");
    require(t.coeff.dimension() == dom_.dim, "term coefficient dimension mismatch");
    for (const auto& f : t.factors)
      require(f.dim() == dom_.dim, "term factor dimension mismatch");
  }
  expand_components();
}

MultiVectorField MultiVectorField::from_components(int grade,
                                                   std::vector<Expression> comps,
                                                   const ChartDomain& domain) {
  require(static_cast<std::int64_t>(comps.size()) == binomial(domain.dim, grade),
          "component count must be C(n, k)");
  const auto& mis = multi_indices(domain.dim, grade);
  std::vector<Term> terms;
  terms.reserve(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    Term t;
    t.coeff = comps[i];
    for (int idx : mis[i]) t.factors.push_back(VectorField::basis(idx, domain));
    terms.push_back(std::move(t));
  }
  return MultiVectorField(grade, std::move(terms), domain);
}

MultiVectorField MultiVectorField::decomposable(Expression coeff,
                                                std::vector<VectorField> factors,
                                                const ChartDomain& domain) {
  int grade = static_cast<int>(factors.size());
  std::vector<Term> terms{{std::move(coeff), std::move(factors)}};
  return MultiVectorField(grade, std::move(terms), domain);
}

void MultiVectorField::expand_components() {
  // Component at multi-index I: sum over terms of coeff * det[factor_a^{I_b}],
  // expanded as expressions so the flat/sharp route can differentiate them.
  const auto& mis = multi_indices(dom_.dim, grade_);
  comps_.clear();
  comps_.reserve(mis.size());
  int k = grade_;
  std::vector<int> perm(static_cast<std::size_t>(k));
  for (const auto& mi : mis) {
    Expression comp = Expression::constant(0.0, dom_.dim);
    for (const auto& term : terms_) {
      Expression det = Expression::constant(0.0, dom_.dim);
      if (k == 0) {
        det = Expression::constant(1.0, dom_.dim);
      } else {
        std::iota(perm.begin(), perm.end(), 0);
        do {
          Expression prod = term.factors[0].component(mi[static_cast<std::size_t>(perm[0])]);
          for (int a = 1; a < k; ++a)
            prod = prod * term.factors[static_cast<std::size_t>(a)].component(
                              mi[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])]);
          if (permutation_sign(perm) < 0) det = det - prod;
          else det = det + prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
      comp = comp + term.coeff * det;
    }
    comps_.push_back(std::move(comp));
  }
}

AltTensor MultiVectorField::at(std::span<const double> p) const {
  dom_.require_inside(p);
  AltTensor acc(dom_.dim, grade_, Variance::Vector);
  for (const auto& term : terms_) {
    AltTensor t = AltTensor::scalar(dom_.dim, Variance::Vector, term.coeff.eval(p));
    for (const auto& f : term.factors) t = wedge(t, f.at(p));
    acc += t;
  }
  return acc;
}

AltTensor MultiVectorField::at_components(std::span<const double> p) const {
  dom_.require_inside(p);
  AltTensor t(dom_.dim, grade_, Variance::Vector);
  for (std::size_t i = 0; i < comps_.size(); ++i)
    t.components()[i] = comps_[i].eval(p);
  return t;
}

DifferentialForm exterior_derivative(const DifferentialForm& omega) {
  int n = omega.dim();
  int k = omega.grade();
  const ChartDomain& dom = omega.domain();
  if (k >= n) return DifferentialForm::zero(k + 1, dom);
  const auto& jis = multi_indices(n, k + 1);
  std::vector<Expression> out;
  out.reserve(jis.size());
  for (const auto& J : jis) {
    Expression acc = Expression::constant(0.0, n);
    for (std::size_t pos = 0; pos < J.size(); ++pos) {
      MultiIndex sub = J;
      sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(pos));
      Expression d = omega.component(static_cast<std::size_t>(mi_rank(sub, n)))
                         .derivative(J[pos]);
      if (pos % 2 == 0) acc = acc + d;
      else acc = acc - d;
    }
    out.push_back(std::move(acc));
  }
  return DifferentialForm(k + 1, std::move(out), dom);
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  int n = a.dim();
  require(n == b.dim(), "form wedge: dimension mismatch");
  int k = a.grade() + b.grade();
  if (k > n) return DifferentialForm::zero(k, a.domain());
  const auto& ais = multi_indices(n, a.grade());
  const auto& bis = multi_indices(n, b.grade());
  std::vector<Expression> out(static_cast<std::size_t>(binomial(n, k)),
                              Expression::constant(0.0, n));
  for (std::size_t i = 0; i < ais.size(); ++i) {
    for (std::size_t j = 0; j < bis.size(); ++j) {
      int s = merge_sign(ais[i], bis[j]);
      if (s == 0) continue;
      std::size_t r = static_cast<std::size_t>(mi_rank(mi_union(ais[i], bis[j]), n));
      Expression prod = a.component(i) * b.component(j);
      if (s < 0) out[r] = out[r] - prod;
      else out[r] = out[r] + prod;
    }
  }
  return DifferentialForm(k, std::move(out), a.domain());
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  int n = x.dim();
  require(n == y.dim(), "lie_bracket: dimension mismatch");
  std::vector<Expression> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Expression acc = Expression::constant(0.0, n);
    for (int j = 0; j < n; ++j) {
      acc = acc + x.component(j) * y.component(i).derivative(j)
                - y.component(j) * x.component(i).derivative(j);
    }
    comps.push_back(std::move(acc));
  }
  return VectorField(std::move(comps), x.domain());
}

Expression directional_derivative(const VectorField& x, const Expression& f) {
  int n = x.dim();
  Expression acc = Expression::constant(0.0, n);
  for (int i = 0; i < n; ++i) acc = acc + x.component(i) * f.derivative(i);
  return acc;
}

MultiVectorField lie_derivative(const VectorField& x, const MultiVectorField& z) {
  // On f * Z1^...^Zk: (Xf) Z1^...^Zk + f * sum_r Z1^...^[X,Zr]^...^Zk.
  std::vector<MultiVectorField::Term> out;
  for (const auto& term : z.terms()) {
    out.push_back({directional_derivative(x, term.coeff), term.factors});
    for (std::size_t r = 0; r < term.factors.size(); ++r) {
      auto factors = term.factors;
      factors[r] = lie_bracket(x, term.factors[r]);
      out.push_back({term.coeff, std::move(factors)});
    }
  }
  return MultiVectorField(z.grade(), std::move(out), z.domain());
}

MultiVectorField wedge(const VectorField& x, const MultiVectorField& z) {
  std::vector<MultiVectorField::Term> out;
  out.reserve(z.terms().size());
  for (const auto& term : z.terms()) {
    std::vector<VectorField> factors;
    factors.reserve(term.factors.size() + 1);
    factors.push_back(x);
    factors.insert(factors.end(), term.factors.begin(), term.factors.end());
    out.push_back({term.coeff, std::move(factors)});
  }
  return MultiVectorField(z.grade() + 1, std::move(out), z.domain());
}

MultiVectorField scale(const Expression& f, const MultiVectorField& z) {
  std::vector<MultiVectorField::Term> out;
  out.reserve(z.terms().size());
  for (const auto& term : z.terms()) out.push_back({f * term.coeff, term.factors});
  return MultiVectorField(z.grade(), std::move(out), z.domain());
}

MultiVectorField add(const MultiVectorField& a, const MultiVectorField& b) {
  require(a.grade() == b.grade(), "multivector add: grade mismatch");
  auto terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return MultiVectorField(a.grade(), std::move(terms), a.domain());
}

}  // namespace excal
