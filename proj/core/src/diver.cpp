#include "excal/diver.hpp"

#include <cmath>
#include <stdexcept>

namespace excal {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

struct ResidualTracker {
  IdentityReport report;

  explicit ResidualTracker(std::string name) { report.name = std::move(name); }

  void observe(double residual, double scale, std::span<const double> p) {
    ++report.samples;
    double rel = residual / std::max(scale, 1e-300);
    if (residual > report.max_abs) {
      report.max_abs = residual;
      report.worst_point.assign(p.begin(), p.end());
      report.scale = scale;
    }
    report.max_rel = std::max(report.max_rel, rel);
  }
};

}  // namespace

VolumeStructure::VolumeStructure(ScalarField rho, int check_grid) : rho_(std::move(rho)) {
  // Positivity is checked on a sample grid at construction.
  const ChartDomain& dom = rho_.domain();
  int n = dom.dim;
  int g = std::max(2, check_grid);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(g);
  std::vector<double> p(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = 0; a < n; ++a) {
      std::size_t ua = static_cast<std::size_t>(a);
      std::size_t i = rest % static_cast<std::size_t>(g);
      rest /= static_cast<std::size_t>(g);
      p[ua] = dom.lo[ua] + (dom.hi[ua] - dom.lo[ua]) * static_cast<double>(i) / (g - 1);
    }
    if (!(rho_.value(p) > 0.0))
      throw std::invalid_argument("density must be strictly positive on the domain");
  }
}

AltTensor VolumeStructure::volume_form_at(std::span<const double> p) const {
  int n = domain().dim;
  MultiIndex full(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) full[static_cast<std::size_t>(i)] = i;
  AltTensor t = AltTensor::basis(n, full, Variance::Covector);
  return t * density_at(p);
}

Expression div_vector(const VectorField& x, const VolumeStructure& vs) {
  int n = x.dim();
  const Expression& rho = vs.density_expr();
  Expression acc = Expression::constant(0.0, n);
  for (int i = 0; i < n; ++i)
    acc = acc + (rho * x.component(i)).derivative(i);
  return acc / rho;
}

DifferentialForm flat_form(const MultiVectorField& z, const VolumeStructure& vs) {
  int n = z.dim();
  int k = z.grade();
  const Expression& rho = vs.density_expr();
  const auto& mis = multi_indices(n, k);
  std::vector<Expression> comps(static_cast<std::size_t>(binomial(n, n - k)),
                                Expression::constant(0.0, n));
  for (std::size_t i = 0; i < mis.size(); ++i) {
    MultiIndex comp = mi_complement(mis[i], n);
    int s = merge_sign(mis[i], comp);
    Expression e = rho * z.component(i);
    if (s < 0) e = -e;
    comps[static_cast<std::size_t>(mi_rank(comp, n))] = std::move(e);
  }
  return DifferentialForm(n - k, std::move(comps), z.domain());
}

MultiVectorField div_strong(const MultiVectorField& z, const VolumeStructure& vs) {
  int n = z.dim();
  int k = z.grade();
  require(k >= 1, "divergence requires grade >= 1");
  DifferentialForm eta = exterior_derivative(flat_form(z, vs));  // grade n-k+1
  const Expression& rho = vs.density_expr();
  double outer_sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
  const auto& mis = multi_indices(n, k - 1);
  std::vector<Expression> comps;
  comps.reserve(mis.size());
  for (const auto& mi : mis) {
    MultiIndex comp = mi_complement(mi, n);
    int s = merge_sign(mi, comp);
    Expression e = eta.component(static_cast<std::size_t>(mi_rank(comp, n))) /
                   (rho * Expression::constant(outer_sign * s, n));
    comps.push_back(std::move(e));
  }
  return MultiVectorField::from_components(k - 1, std::move(comps), z.domain());
}

MultiVectorField div_recursive(const MultiVectorField& z, const VolumeStructure& vs) {
  int k = z.grade();
  require(k >= 1, "divergence requires grade >= 1");
  const ChartDomain& dom = z.domain();
  int n = dom.dim;

  std::vector<MultiVectorField::Term> out;
  for (const auto& term : z.terms()) {
    // Fold the coefficient into the leading factor: f Z1^...^Zk = (f Z1)^Z2^...
    std::vector<Expression> lead;
    lead.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) lead.push_back(term.coeff * term.factors[0].component(i));
    VectorField x(std::move(lead), dom);

    if (k == 1) {
      out.push_back({div_vector(x, vs), {}});
      continue;
    }

    std::vector<VectorField> rest_factors(term.factors.begin() + 1, term.factors.end());
    MultiVectorField rest = MultiVectorField::decomposable(
        Expression::constant(1.0, n), std::move(rest_factors), dom);

    MultiVectorField div_rest = div_recursive(rest, vs);
    MultiVectorField piece = add(
        scale(div_vector(x, vs), rest),
        add(scale(Expression::constant(-1.0, n), wedge(x, div_rest)),
            lie_derivative(x, rest)));
    out.insert(out.end(), piece.terms().begin(), piece.terms().end());
  }
  return MultiVectorField(k - 1, std::move(out), dom);
}

IdentityReport check_lemma1(const DifferentialForm& omega, const MultiVectorField& z,
                            const VolumeStructure& vs, const PointSet& points) {
  require(omega.grade() == z.grade(), "lemma1 needs matching grades");
  ResidualTracker tracker("lemma1");
  for (const auto& p : points) {
    AltTensor w = omega.at(p);
    AltTensor zt = z.at(p);
    AltTensor vol = vs.volume_form_at(p);
    AltTensor lhs = wedge(w, interior_by_multivector(vol, zt));
    AltTensor rhs = vol * pair(w, zt);
    tracker.observe((lhs - rhs).norm(), std::max(lhs.norm(), rhs.norm()), p);
  }
  return tracker.report;
}

IdentityReport check_aux(const DifferentialForm& omega, const MultiVectorField& x,
                         const VolumeStructure& vs, const PointSet& points) {
  int k = omega.grade(), m = x.grade();
  require(k <= m, "auxiliary identity needs k <= m");
  double sign = (k * (m + 1)) % 2 == 0 ? 1.0 : -1.0;
  ResidualTracker tracker("auxiliary");
  for (const auto& p : points) {
    AltTensor w = omega.at(p);
    AltTensor xt = x.at(p);
    double rho = vs.density_at(p);
    AltTensor lhs = omega_flat(interior_by_form(w, xt), rho);
    AltTensor rhs = wedge(w, omega_flat(xt, rho)) * sign;
    tracker.observe((lhs - rhs).norm(), std::max(lhs.norm(), rhs.norm()), p);
  }
  return tracker.report;
}

MultiVectorField interior_by_form_field(const DifferentialForm& omega,
                                        const MultiVectorField& z) {
  int n = z.dim();
  int k = omega.grade(), m = z.grade();
  require(k <= m, "interior_by_form_field needs k <= m");
  const auto& ois = multi_indices(n, k);
  const auto& jis = multi_indices(n, m - k);
  std::vector<Expression> comps;
  comps.reserve(jis.size());
  for (const auto& J : jis) {
    Expression acc = Expression::constant(0.0, n);
    for (std::size_t i = 0; i < ois.size(); ++i) {
      int s = merge_sign(ois[i], J);
      if (s == 0) continue;
      Expression prod =
          omega.component(i) *
          z.component(static_cast<std::size_t>(mi_rank(mi_union(ois[i], J), n)));
      if (s < 0) acc = acc - prod;
      else acc = acc + prod;
    }
    comps.push_back(std::move(acc));
  }
  return MultiVectorField::from_components(m - k, std::move(comps), z.domain());
}

IdentityReport check_leibniz_j(const DifferentialForm& omega, const MultiVectorField& z,
                               const VolumeStructure& vs, const PointSet& points) {
  int k = omega.grade(), m = z.grade();
  require(k < m, "j-Leibniz rule needs k < m");
  double sign = k % 2 == 0 ? 1.0 : -1.0;

  MultiVectorField lhs = div_strong(interior_by_form_field(omega, z), vs);
  MultiVectorField t1 = interior_by_form_field(exterior_derivative(omega), z);
  MultiVectorField t2 = interior_by_form_field(omega, div_strong(z, vs));

  ResidualTracker tracker("leibniz_j");
  for (const auto& p : points) {
    AltTensor l = lhs.at_components(p);
    AltTensor a = t1.at_components(p);
    AltTensor b = t2.at_components(p);
    AltTensor r = (a + b) * sign;
    double scale = std::max({l.norm(), a.norm(), b.norm()});
    tracker.observe((l - r).norm(), scale, p);
  }
  return tracker.report;
}

IdentityReport check_operator_agreement(const MultiVectorField& z,
                                        const VolumeStructure& vs,
                                        const PointSet& points) {
  MultiVectorField a = div_strong(z, vs);
  MultiVectorField b = div_recursive(z, vs);
  ResidualTracker tracker("operator_agreement");
  for (const auto& p : points) {
    AltTensor ta = a.at_components(p);
    AltTensor tb = b.at(p);
    tracker.observe((ta - tb).norm(), std::max(ta.norm(), tb.norm()), p);
  }
  return tracker.report;
}

WeakDivResult weak_div_residual(const MultiVectorField& z, const MultiVectorField& w,
                                const DifferentialForm& omega, const VolumeStructure& vs,
                                const QuadratureSpec& q,
                                const std::optional<Bump>& support) {
  require(omega.grade() == z.grade() - 1, "test form grade must be k-1");
  require(w.grade() == z.grade() - 1, "candidate grade must be k-1");
  const ChartDomain& dom = vs.domain();
  int n = dom.dim;

  // The Stokes argument needs the test form to vanish near the boundary:
  // probe face centers and corners.
  {
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int axis = 0; axis < n; ++axis) {
      for (int side = 0; side < 2; ++side) {
        for (int i = 0; i < n; ++i) {
          std::size_t u = static_cast<std::size_t>(i);
          p[u] = 0.5 * (dom.lo[u] + dom.hi[u]);
        }
        p[static_cast<std::size_t>(axis)] =
            side ? dom.hi[static_cast<std::size_t>(axis)]
                 : dom.lo[static_cast<std::size_t>(axis)];
        if (omega.at(p).norm() > 1e-12)
          throw std::invalid_argument("test form support touches the domain boundary");
      }
    }
  }

  DifferentialForm domega = exterior_derivative(omega);
  auto run = [&](const ScalarFn& f) {
    if (support)
      return integrate_ball(f, support->center, support->radius, q.nodes_per_axis,
                            2 * q.nodes_per_axis);
    return integrate(f, dom, q);
  };
  auto lhs = run([&](std::span<const double> p) {
    return pair(domega.at(p), z.at_components(p)) * vs.density_at(p);
  });
  auto rhs = run([&](std::span<const double> p) {
    return pair(omega.at(p), w.at_components(p)) * vs.density_at(p);
  });
  return {std::abs(lhs.value + rhs.value), lhs.error + rhs.error,
          std::abs(lhs.value) + 1.0};
}

}  // namespace excal
