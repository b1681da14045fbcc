#include "excal/quad.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace excal {

namespace {

// Legendre P_n and P_n' by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

double grid_integral(const ScalarFn& f, const ChartDomain& box, int nodes, int panels) {
  int n = box.dim;
  std::vector<double> gx, gw;
  gauss_legendre(nodes, gx, gw);

  // Per-axis composite node/weight lists.
  std::vector<std::vector<double>> xs(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> ws(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    std::size_t ua = static_cast<std::size_t>(a);
    double lo = box.lo[ua], hi = box.hi[ua];
    double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      double c = lo + (p + 0.5) * h;
      for (int i = 0; i < nodes; ++i) {
        xs[ua].push_back(c + 0.5 * h * gx[static_cast<std::size_t>(i)]);
        ws[ua].push_back(0.5 * h * gw[static_cast<std::size_t>(i)]);
      }
    }
  }

  std::size_t per_axis = xs[0].size();
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= per_axis;

  std::vector<double> point(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      std::size_t ua = static_cast<std::size_t>(a);
      std::size_t i = rest % per_axis;
      rest /= per_axis;
      point[ua] = xs[ua][i];
      w *= ws[ua][i];
    }
    acc += w * f(point);
  }
  return acc;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n <= 0) throw std::invalid_argument("quadrature needs at least one node");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    weights[static_cast<std::size_t>(i)] = w;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

IntegralResult integrate(const ScalarFn& f, const ChartDomain& box,
                         const QuadratureSpec& q) {
  if (q.mode == QuadratureSpec::Mode::TensorGrid) {
    if (q.nodes_per_axis <= 0 || q.panels <= 0)
      throw std::invalid_argument("tensor grid needs positive nodes and panels");
    double fine = grid_integral(f, box, q.nodes_per_axis, q.panels);
    int coarse_nodes = std::max(1, q.nodes_per_axis / 2);
    double coarse = grid_integral(f, box, coarse_nodes, q.panels);
    if (!std::isfinite(fine)) throw EvalError("non-finite integrand on grid");
    return {fine, std::abs(fine - coarse)};
  }

  if (q.samples <= 0) throw std::invalid_argument("monte carlo needs positive samples");
  std::mt19937_64 rng(q.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int n = box.dim;
  double vol = box.volume();
  std::vector<double> point(static_cast<std::size_t>(n));
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t s = 0; s < q.samples; ++s) {
    for (int a = 0; a < n; ++a) {
      std::size_t ua = static_cast<std::size_t>(a);
      point[ua] = box.lo[ua] + unit(rng) * (box.hi[ua] - box.lo[ua]);
    }
    double v = f(point);
    sum += v;
    sum2 += v * v;
  }
  double ns = static_cast<double>(q.samples);
  double mean = sum / ns;
  double var = std::max(0.0, sum2 / ns - mean * mean);
  double stderr_ = std::sqrt(var / ns) * vol;
  if (!std::isfinite(mean)) throw EvalError("non-finite integrand in sampling");
  return {mean * vol, stderr_};
}

IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                            int nodes, int panels) {
  QuadratureSpec q;
  q.nodes_per_axis = nodes;
  q.panels = panels;
  ChartDomain box({a}, {b});
  return integrate([&](std::span<const double> p) { return f(p[0]); }, box, q);
}

Expression Bump::expression(int dim) const {
  if (static_cast<int>(center.size()) != dim)
    throw std::invalid_argument("bump center dimension mismatch");
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  Expression q = Expression::constant(0.0, dim);
  for (int i = 0; i < dim; ++i) {
    Expression d = Expression::variable(i, dim) -
                   Expression::constant(center[static_cast<std::size_t>(i)], dim);
    q = q + d * d;
  }
  Expression t = Expression::constant(1.0, dim) -
                 q / Expression::constant(radius * radius, dim);
  return t.apply(Func::PosPart).pow_int(2);
}

DifferentialForm make_bump_form(int grade, const std::vector<double>& center,
                                double radius, const std::vector<MultiIndex>& selected,
                                const ChartDomain& domain) {
  int n = domain.dim;
  for (int i = 0; i < n; ++i) {
    std::size_t u = static_cast<std::size_t>(i);
    double pad = radius * (1.0 + 1e-9);
    if (center[u] - pad <= domain.lo[u] || center[u] + pad >= domain.hi[u])
      throw std::invalid_argument("bump support not strictly interior to the domain");
  }
  Expression bump = Bump{center, radius}.expression(n);
  DifferentialForm form = DifferentialForm::zero(grade, domain);
  for (const auto& mi : selected)
    form.component(static_cast<std::size_t>(mi_rank(mi, n))) = bump;
  return form;
}


namespace {

void ball_require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double ball_volume(int m, double r) {
  ball_require(m >= 1 && r >= 0.0, "ball volume needs m >= 1, r >= 0");
  return std::pow(kPi, m / 2.0) * std::pow(r, m) / std::tgamma(m / 2.0 + 1.0);
}

void ball_quadrature(int m, double r, int radial_nodes, int angular_nodes,
                     std::vector<std::vector<double>>& nodes,
                     std::vector<double>& weights) {
  ball_require(m >= 1 && r > 0.0, "ball quadrature needs m >= 1, r > 0");
  nodes.clear();
  weights.clear();

  std::vector<double> gn, gw;
  gauss_legendre(std::max(2, radial_nodes), gn, gw);

  if (m == 1) {
    for (std::size_t i = 0; i < gn.size(); ++i) {
      nodes.push_back({r * gn[i]});
      weights.push_back(r * gw[i]);
    }
    return;
  }

  // Radius on (0, r) with the u^(m-1) factor; the last angle is periodic
  // (uniform nodes), intermediate angles are Gauss on (0, pi) with the
  // sin-power factors of the spherical volume element.
  std::vector<std::vector<double>> ang_nodes(static_cast<std::size_t>(m - 1));
  std::vector<std::vector<double>> ang_wts(static_cast<std::size_t>(m - 1));
  for (int a = 0; a < m - 2; ++a) {
    for (std::size_t i = 0; i < gn.size(); ++i) {
      ang_nodes[static_cast<std::size_t>(a)].push_back(0.5 * kPi * (gn[i] + 1.0));
      ang_wts[static_cast<std::size_t>(a)].push_back(0.5 * kPi * gw[i]);
    }
  }
  int na = std::max(4, angular_nodes);
  for (int k = 0; k < na; ++k) {
    ang_nodes[static_cast<std::size_t>(m - 2)].push_back(2.0 * kPi * (k + 0.5) / na);
    ang_wts[static_cast<std::size_t>(m - 2)].push_back(2.0 * kPi / na);
  }

  std::vector<std::size_t> idx(static_cast<std::size_t>(m - 1), 0);
  for (;;) {
    double wang = 1.0;
    std::vector<double> angles(static_cast<std::size_t>(m - 1));
    for (int a = 0; a < m - 1; ++a) {
      std::size_t ua = static_cast<std::size_t>(a);
      angles[ua] = ang_nodes[ua][idx[ua]];
      wang *= ang_wts[ua][idx[ua]];
      if (a < m - 2) wang *= std::pow(std::sin(angles[ua]), m - 2 - a);
    }
    std::vector<double> unit(static_cast<std::size_t>(m));
    double sprod = 1.0;
    for (int a = 0; a < m - 1; ++a) {
      unit[static_cast<std::size_t>(a)] = sprod * std::cos(angles[static_cast<std::size_t>(a)]);
      sprod *= std::sin(angles[static_cast<std::size_t>(a)]);
    }
    unit[static_cast<std::size_t>(m - 1)] = sprod;

    for (std::size_t i = 0; i < gn.size(); ++i) {
      double u = 0.5 * r * (gn[i] + 1.0);
      double wu = 0.5 * r * gw[i] * std::pow(u, m - 1);
      std::vector<double> p(static_cast<std::size_t>(m));
      for (int a = 0; a < m; ++a) p[static_cast<std::size_t>(a)] =
          u * unit[static_cast<std::size_t>(a)];
      nodes.push_back(std::move(p));
      weights.push_back(wu * wang);
    }

    int carry = m - 2;
    while (carry >= 0) {
      std::size_t uc = static_cast<std::size_t>(carry);
      if (++idx[uc] < ang_nodes[uc].size()) break;
      idx[uc] = 0;
      --carry;
    }
    if (carry < 0) break;
  }
}

IntegralResult integrate_ball(const ScalarFn& f, std::span<const double> center,
                              double radius, int radial_nodes, int angular_nodes) {
  int m = static_cast<int>(center.size());
  auto pass = [&](int rn, int an) {
    std::vector<std::vector<double>> nodes;
    std::vector<double> wts;
    ball_quadrature(m, radius, rn, an, nodes, wts);
    double acc = 0.0;
    std::vector<double> p(center.begin(), center.end());
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      for (int i = 0; i < m; ++i)
        p[static_cast<std::size_t>(i)] =
            center[static_cast<std::size_t>(i)] + nodes[b][static_cast<std::size_t>(i)];
      acc += wts[b] * f(p);
    }
    return acc;
  };
  double fine = pass(radial_nodes, angular_nodes);
  double coarse = pass(std::max(2, radial_nodes / 2), std::max(4, angular_nodes / 2));
  if (!std::isfinite(fine)) throw EvalError("non-finite integrand on ball grid");
  return {fine, std::abs(fine - coarse)};
}

}  // namespace excal
