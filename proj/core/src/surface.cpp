#include "excal/surface.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace excal {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string format_point(std::span<const double> p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ", ";
    os << p[i];
  }
  os << ")";
  return os.str();
}

PointSet grid_points(const ChartDomain& box, int per_axis) {
  int n = box.dim;
  int g = std::max(2, per_axis);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(g);
  PointSet out;
  out.reserve(total);
  std::vector<double> p(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = 0; a < n; ++a) {
      std::size_t ua = static_cast<std::size_t>(a);
      std::size_t i = rest % static_cast<std::size_t>(g);
      rest /= static_cast<std::size_t>(g);
      p[ua] = box.lo[ua] + (box.hi[ua] - box.lo[ua]) * static_cast<double>(i) / (g - 1);
    }
    out.push_back(p);
  }
  return out;
}

Eigen::MatrixXd field_jacobian(const VectorField& y, std::span<const double> p) {
  auto rows = y.jacobian(p);
  int n = y.dim();
  Eigen::MatrixXd J(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      J(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return J;
}

}  // namespace

std::vector<double> StraighteningMap::map_chart(std::span<const double> st) const {
  require(static_cast<int>(st.size()) == dim, "chart point has wrong dimension");
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int p = 0; p < dim; ++p) out[static_cast<std::size_t>(p)] =
      forward[static_cast<std::size_t>(p)].eval(st);
  return out;
}

std::vector<double> StraighteningMap::map(std::span<const double> s,
                                          std::span<const double> t) const {
  require(static_cast<int>(s.size()) == surface_dim() &&
          static_cast<int>(t.size()) == codim,
          "chart split has wrong dimensions");
  std::vector<double> st(s.begin(), s.end());
  st.insert(st.end(), t.begin(), t.end());
  return map_chart(st);
}

std::vector<double> StraighteningMap::inverse_map(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim, "ambient point has wrong dimension");
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int p = 0; p < dim; ++p) out[static_cast<std::size_t>(p)] =
      inverse[static_cast<std::size_t>(p)].eval(x);
  return out;
}

Eigen::MatrixXd StraighteningMap::jacobian(std::span<const double> st) const {
  Eigen::MatrixXd J(dim, dim);
  for (int p = 0; p < dim; ++p) {
    auto [v, grad] = forward[static_cast<std::size_t>(p)].eval_grad(st);
    (void)v;
    for (int j = 0; j < dim; ++j) J(p, j) = grad[static_cast<std::size_t>(j)];
  }
  return J;
}

void StraighteningMap::self_check(int grid, double tol) const {
  require(dim >= 1 && codim >= 1 && codim < dim, "bad chart dimensions");
  require(static_cast<int>(forward.size()) == dim &&
          static_cast<int>(inverse.size()) == dim,
          "chart needs n forward and n inverse expressions");
  for (const auto& st : grid_points(chart_box, grid)) {
    std::vector<double> x = map_chart(st);
    std::vector<double> back = inverse_map(x);
    double scale = 1.0;
    for (double v : st) scale += std::abs(v);
    for (int i = 0; i < dim; ++i)
      if (std::abs(back[static_cast<std::size_t>(i)] - st[static_cast<std::size_t>(i)]) >
          tol * scale)
        throw std::runtime_error("chart round trip fails at " + format_point(st));
    if (std::abs(jacobian(st).determinant()) < 1e-10)
      throw std::runtime_error("chart Jacobian singular at " + format_point(st));
  }
}

std::vector<double> ElementarySurface::point(std::span<const double> s) const {
  std::vector<double> t(static_cast<std::size_t>(chart.codim), 0.0);
  return chart.map(s, t);
}

Eigen::MatrixXd ElementarySurface::tangent_frame(std::span<const double> s) const {
  int q = chart.surface_dim();
  std::vector<double> st(s.begin(), s.end());
  st.resize(static_cast<std::size_t>(chart.dim), 0.0);
  return chart.jacobian(st).leftCols(q);
}

DifferentialForm TransversalSystem::associated_form(const StraighteningMap& chart,
                                                    const Expression& h_of_t,
                                                    const ChartDomain& ambient) {
  int n = chart.dim, m = chart.codim, q = n - m;
  require(h_of_t.dimension() == m, "h must be a function of the m flow times");
  std::vector<Expression> taus;
  taus.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) taus.push_back(chart.inverse[static_cast<std::size_t>(q + j)]);
  DifferentialForm form = DifferentialForm::scalar(h_of_t.compose(taus), ambient);
  for (int j = 0; j < m; ++j) {
    std::vector<Expression> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p)
      comps.push_back(chart.inverse[static_cast<std::size_t>(q + j)].derivative(p));
    form = wedge(form, DifferentialForm(1, std::move(comps), ambient));
  }
  return form;
}

void TransversalSystem::validate(const ElementarySurface& surface, int samples_per_axis,
                                 double commute_tol) const {
  int m = static_cast<int>(fields.size());
  require(m >= 1, "transversal system needs at least one field");
  require(alpha.grade() == m, "associated form grade must match the field count");

  for (const auto& x : grid_points(fields[0].domain(), samples_per_axis)) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        AltTensor br = lie_bracket(fields[static_cast<std::size_t>(i)],
                                   fields[static_cast<std::size_t>(j)]).at(x);
        if (br.norm() > commute_tol)
          throw std::runtime_error("transversal fields do not commute at " +
                                   format_point(x));
      }
  }

  for (const auto& s : grid_points(surface.param_box.inner(), samples_per_axis)) {
    std::vector<double> x = surface.point(s);
    AltTensor a = alpha.at(x);
    AltTensor yw = fields[0].at(x);
    for (int j = 1; j < m; ++j) yw = wedge(yw, fields[static_cast<std::size_t>(j)].at(x));
    if (std::abs(pair(a, yw)) < delta)
      throw std::runtime_error("transversality degenerates at " + format_point(x));

    Eigen::MatrixXd frame = surface.tangent_frame(s);
    for (int b = 0; b < frame.cols(); ++b) {
      std::vector<double> col(frame.col(b).data(), frame.col(b).data() + frame.rows());
      AltTensor tb = AltTensor::from_vector(col, Variance::Vector);
      double tol = commute_tol * (1.0 + a.norm()) * (1.0 + frame.col(b).norm());
      if (interior_by_multivector(a, tb).norm() > tol)
        throw std::runtime_error("associated form does not annihilate the tangent space at " +
                                 format_point(x));
    }
  }
}

std::vector<double> FlowEngine::flow_one(const VectorField& y, double t,
                                         std::vector<double> x) const {
  int n = y.dim();
  bounds.require_inside(x);
  if (t == 0.0) return x;
  long nsteps = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / step)));
  if (nsteps > max_steps)
    throw std::invalid_argument("flow exceeds the step budget");
  double h = t / static_cast<double>(nsteps);

  std::vector<double> k1, k2, k3, k4, tmp(static_cast<std::size_t>(n));
  for (long st = 0; st < nsteps; ++st) {
    k1 = y.values(x);
    for (int i = 0; i < n; ++i) tmp[static_cast<std::size_t>(i)] =
        x[static_cast<std::size_t>(i)] + 0.5 * h * k1[static_cast<std::size_t>(i)];
    k2 = y.values(tmp);
    for (int i = 0; i < n; ++i) tmp[static_cast<std::size_t>(i)] =
        x[static_cast<std::size_t>(i)] + 0.5 * h * k2[static_cast<std::size_t>(i)];
    k3 = y.values(tmp);
    for (int i = 0; i < n; ++i) tmp[static_cast<std::size_t>(i)] =
        x[static_cast<std::size_t>(i)] + h * k3[static_cast<std::size_t>(i)];
    k4 = y.values(tmp);
    for (int i = 0; i < n; ++i) {
      std::size_t u = static_cast<std::size_t>(i);
      x[u] += h / 6.0 * (k1[u] + 2.0 * k2[u] + 2.0 * k3[u] + k4[u]);
    }
    if (!bounds.contains(x))
      throw std::runtime_error("flow trajectory left the chart at " + format_point(x));
  }
  return x;
}

std::vector<double> FlowEngine::flow(const std::vector<VectorField>& ys,
                                     std::span<const double> t,
                                     std::vector<double> x) const {
  require(t.size() == ys.size(), "flow needs one time per field");
  for (std::size_t j = ys.size(); j-- > 0;) x = flow_one(ys[j], t[j], std::move(x));
  return x;
}

std::pair<std::vector<double>, Eigen::MatrixXd> FlowEngine::flow_jacobian(
    const std::vector<VectorField>& ys, std::span<const double> t,
    std::vector<double> x) const {
  require(t.size() == ys.size(), "flow needs one time per field");
  int n = static_cast<int>(x.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  bounds.require_inside(x);

  for (std::size_t fj = ys.size(); fj-- > 0;) {
    const VectorField& y = ys[fj];
    double tt = t[fj];
    if (tt == 0.0) continue;
    long nsteps = std::max(1L, static_cast<long>(std::ceil(std::abs(tt) / step)));
    if (nsteps > max_steps)
      throw std::invalid_argument("flow exceeds the step budget");
    double h = tt / static_cast<double>(nsteps);

    Eigen::Map<Eigen::VectorXd> xv(x.data(), n);
    std::vector<double> tmp(static_cast<std::size_t>(n));
    for (long st = 0; st < nsteps; ++st) {
      // Variational RK4 on the pair (x, J): dx = Y(x), dJ = DY(x) J.
      auto stage = [&](const Eigen::VectorXd& xs, const Eigen::MatrixXd& Js,
                       Eigen::VectorXd& kx, Eigen::MatrixXd& kJ) {
        for (int i = 0; i < n; ++i) tmp[static_cast<std::size_t>(i)] = xs(i);
        auto vals = y.values(tmp);
        kx = Eigen::Map<Eigen::VectorXd>(vals.data(), n);
        kJ = field_jacobian(y, tmp) * Js;
      };
      Eigen::VectorXd x0 = xv, k1x(n), k2x(n), k3x(n), k4x(n);
      Eigen::MatrixXd J0 = J, k1J, k2J, k3J, k4J;
      stage(x0, J0, k1x, k1J);
      stage(x0 + 0.5 * h * k1x, J0 + 0.5 * h * k1J, k2x, k2J);
      stage(x0 + 0.5 * h * k2x, J0 + 0.5 * h * k2J, k3x, k3J);
      stage(x0 + h * k3x, J0 + h * k3J, k4x, k4J);
      xv = x0 + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      J = J0 + h / 6.0 * (k1J + 2.0 * k2J + 2.0 * k3J + k4J);
      if (!bounds.contains(x))
        throw std::runtime_error("flow trajectory left the chart at " + format_point(x));
    }
  }
  return {std::move(x), std::move(J)};
}

TubePoint tube_point(const SurfaceSetup& setup, std::span<const double> t,
                     std::span<const double> s, bool with_jacobian) {
  const StraighteningMap& chart = setup.surface.chart;
  int n = chart.dim, m = chart.codim, q = n - m;
  std::vector<double> x0 = setup.surface.point(s);

  bool zero_t = std::all_of(t.begin(), t.end(), [](double v) { return v == 0.0; });
  if (!with_jacobian) {
    TubePoint tp;
    tp.x = zero_t ? std::move(x0) : setup.engine.flow(setup.system.fields, t, std::move(x0));
    return tp;
  }

  std::vector<double> x;
  Eigen::MatrixXd dphi;
  if (zero_t) {
    x = std::move(x0);
    dphi = Eigen::MatrixXd::Identity(n, n);
  } else {
    std::tie(x, dphi) = setup.engine.flow_jacobian(setup.system.fields, t, std::move(x0));
  }

  TubePoint tp;
  tp.dpsi.resize(n, n);
  tp.dpsi.leftCols(q) = dphi * setup.surface.tangent_frame(s);
  for (int j = 0; j < m; ++j) {
    // d psi / d t_j = Y_j(psi), exact for commuting flows.
    auto yv = setup.system.fields[static_cast<std::size_t>(j)].values(x);
    for (int i = 0; i < n; ++i) tp.dpsi(i, q + j) = yv[static_cast<std::size_t>(i)];
  }
  if (std::abs(tp.dpsi.determinant()) < 1e-12)
    throw std::runtime_error("tube parametrization is singular at " + format_point(x));
  tp.x = std::move(x);
  return tp;
}

IntegralResult tube_measure(const SurfaceSetup& setup, double r) {
  int m = setup.surface.chart.codim;
  std::vector<std::vector<double>> tnodes;
  std::vector<double> twts;
  ball_quadrature(m, r, setup.ball_radial_nodes, setup.ball_angular_nodes, tnodes, twts);

  IntegralResult out;
  for (std::size_t b = 0; b < tnodes.size(); ++b) {
    auto inner = integrate(
        [&](std::span<const double> s) {
          TubePoint tp = tube_point(setup, tnodes[b], s, true);
          return setup.volume.density_at(tp.x) * std::abs(tp.dpsi.determinant());
        },
        setup.surface.param_box, setup.quad);
    out.value += twts[b] * inner.value;
    out.error += std::abs(twts[b]) * inner.error;
  }
  return out;
}

double extrapolate_r2(std::span<const double> radii, std::span<const double> values) {
  require(radii.size() == values.size() && radii.size() >= 2,
          "extrapolation needs at least two radii");
  std::size_t n = radii.size();
  std::vector<double> x(n), f(values.begin(), values.end());
  for (std::size_t i = 0; i < n; ++i) x[i] = radii[i] * radii[i];
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      f[i] = ((0.0 - x[i - j]) * f[i] - (0.0 - x[i]) * f[i - 1]) / (x[i] - x[i - j]);
      if (i == j) break;
    }
  return f[n - 1];
}

double observed_order(std::span<const double> radii, std::span<const double> values,
                      double noise) {
  require(radii.size() == values.size() && radii.size() >= 3,
          "order estimate needs at least three radii");
  double d0 = values[0] - values[1];
  double d1 = values[1] - values[2];
  double floor = noise * (1.0 + std::abs(values[0]));
  if (std::abs(d1) <= floor || std::abs(d0) <= floor) return 16.0;
  return std::log(std::abs(d0 / d1)) / std::log(radii[0] / radii[1]);
}

SurfaceMeasureReport surface_measure(const SurfaceSetup& setup,
                                     std::span<const double> radii) {
  require(radii.size() >= 3, "surface measure needs at least three radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    require(radii[i] > radii[i + 1] && radii[i + 1] > 0.0,
            "radii must be strictly decreasing and positive");
  SurfaceMeasureReport rep;
  rep.radii.assign(radii.begin(), radii.end());
  int m = setup.surface.chart.codim;

  double max_err = 0.0;
  for (double r : radii) {
    double bv = ball_volume(m, r);
    IntegralResult tm = tube_measure(setup, r);
    rep.sigma_r.push_back(tm.value / bv);
    rep.sigma_err.push_back(tm.error / bv);
    max_err = std::max(max_err, tm.error / bv);
  }

  std::vector<double> zeros(static_cast<std::size_t>(m), 0.0);
  rep.sigma_direct = integrate(
      [&](std::span<const double> s) {
        TubePoint tp = tube_point(setup, zeros, s, true);
        return setup.volume.density_at(tp.x) * std::abs(tp.dpsi.determinant());
      },
      setup.surface.param_box, setup.quad).value;

  double noise = 10.0 * max_err + 1e-12 * (1.0 + std::abs(rep.sigma_r[0]));
  if (radii.size() >= 3)
    rep.observed_order = observed_order(radii, rep.sigma_r, noise);
  for (std::size_t i = 0; i + 2 < rep.sigma_r.size(); ++i) {
    double d0 = rep.sigma_r[i] - rep.sigma_r[i + 1];
    double d1 = rep.sigma_r[i + 1] - rep.sigma_r[i + 2];
    bool small = std::abs(d0) <= noise && std::abs(d1) <= noise;
    bool settling = d0 * d1 >= 0.0 && std::abs(d1) <= std::abs(d0) + noise;
    if (!small && !settling) rep.monotone_ok = false;
  }
  rep.sigma_extrapolated =
      rep.monotone_ok ? extrapolate_r2(radii, rep.sigma_r) : rep.sigma_r.back();
  return rep;
}

TubeAverageReport lemma3_average(const SurfaceSetup& setup, const ScalarField& u,
                                 std::span<const double> radii) {
  require(radii.size() >= 3, "tube averaging needs at least three radii");
  TubeAverageReport rep;
  rep.radii.assign(radii.begin(), radii.end());
  int m = setup.surface.chart.codim;

  for (double r : radii) {
    std::vector<std::vector<double>> tnodes;
    std::vector<double> twts;
    ball_quadrature(m, r, setup.ball_radial_nodes, setup.ball_angular_nodes, tnodes, twts);
    double val = 0.0;
    for (std::size_t b = 0; b < tnodes.size(); ++b) {
      val += twts[b] * integrate(
          [&](std::span<const double> s) {
            TubePoint tp = tube_point(setup, tnodes[b], s, true);
            return u.value(tp.x) * setup.volume.density_at(tp.x) *
                   std::abs(tp.dpsi.determinant());
          },
          setup.surface.param_box, setup.quad).value;
    }
    rep.averages.push_back(val / ball_volume(m, r));
  }

  std::vector<double> zeros(static_cast<std::size_t>(m), 0.0);
  rep.direct = integrate(
      [&](std::span<const double> s) {
        TubePoint tp = tube_point(setup, zeros, s, true);
        return u.value(tp.x) * setup.volume.density_at(tp.x) *
               std::abs(tp.dpsi.determinant());
      },
      setup.surface.param_box, setup.quad).value;

  rep.extrapolated = extrapolate_r2(radii, rep.averages);
  rep.observed_order = observed_order(radii, rep.averages);
  return rep;
}

std::vector<double> q_connected_lift(const SurfaceSetup& setup, const VectorField& z,
                                     std::span<const double> t,
                                     std::span<const double> s) {
  std::vector<double> x0 = setup.surface.point(s);
  std::vector<double> zv = z.values(x0);
  bool zero_t = std::all_of(t.begin(), t.end(), [](double v) { return v == 0.0; });
  if (zero_t) return zv;
  auto [x, J] = setup.engine.flow_jacobian(setup.system.fields, t, std::move(x0));
  (void)x;
  Eigen::VectorXd lifted = J * Eigen::Map<Eigen::VectorXd>(zv.data(), J.cols());
  return std::vector<double>(lifted.data(), lifted.data() + lifted.size());
}

std::vector<double> chart_components(const SurfaceSetup& setup, const VectorField& z,
                                     std::span<const double> s, double tangency_tol) {
  const StraighteningMap& chart = setup.surface.chart;
  int n = chart.dim, q = chart.surface_dim();
  std::vector<double> st(s.begin(), s.end());
  st.resize(static_cast<std::size_t>(n), 0.0);
  Eigen::MatrixXd J = chart.jacobian(st);
  std::vector<double> zv = z.values(chart.map_chart(st));
  Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(zv.data(), n);
  Eigen::VectorXd c = J.partialPivLu().solve(rhs);
  double tol = tangency_tol * (1.0 + c.norm());
  for (int j = q; j < n; ++j)
    if (std::abs(c(j)) > tol)
      throw std::invalid_argument("field is not tangent to the surface at " +
                                  format_point(s));
  return std::vector<double>(c.data(), c.data() + q);
}

namespace {

// sum_i d/ds_i (rhohat z^i)(s) at fixed flow times, with rhohat(t, s) =
// rho(psi) |det D psi| and z the chart components of the tangent field.
// Central differences in s; also returns rhohat at the center.
std::pair<double, double> surface_flux_divergence(const SurfaceSetup& setup,
                                                  const VectorField& z,
                                                  std::span<const double> t,
                                                  std::span<const double> s) {
  int q = setup.surface.chart.surface_dim();
  const double h = 1e-5;
  auto rhohat_z = [&](std::span<const double> sp, int i) {
    TubePoint tp = tube_point(setup, t, sp, true);
    double rh = setup.volume.density_at(tp.x) * std::abs(tp.dpsi.determinant());
    std::vector<double> zc = chart_components(setup, z, sp);
    return rh * zc[static_cast<std::size_t>(i)];
  };
  double total = 0.0;
  std::vector<double> sp(s.begin(), s.end());
  for (int i = 0; i < q; ++i) {
    std::size_t ui = static_cast<std::size_t>(i);
    double s0 = sp[ui];
    sp[ui] = s0 + h;
    double fp = rhohat_z(sp, i);
    sp[ui] = s0 - h;
    double fm = rhohat_z(sp, i);
    sp[ui] = s0;
    total += (fp - fm) / (2.0 * h);
  }
  TubePoint tp = tube_point(setup, t, s, true);
  double rh = setup.volume.density_at(tp.x) * std::abs(tp.dpsi.determinant());
  return {total, rh};
}

}  // namespace

Theorem2Report theorem2_check(const SurfaceSetup& setup, const VectorField& z,
                              const Expression& u_of_s, std::span<const double> radii) {
  const StraighteningMap& chart = setup.surface.chart;
  int m = chart.codim, q = chart.surface_dim();
  require(u_of_s.dimension() == q, "u must be a function of the surface parameters");
  require(radii.size() >= 3, "tube-limit check needs at least three radii");

  Theorem2Report rep;
  rep.radii.assign(radii.begin(), radii.end());

  std::vector<double> zeros(static_cast<std::size_t>(m), 0.0);
  rep.lhs = integrate(
      [&](std::span<const double> s) {
        return u_of_s.eval(s) * surface_flux_divergence(setup, z, zeros, s).first;
      },
      setup.surface.param_box, setup.quad).value;

  for (double r : radii) {
    std::vector<std::vector<double>> tnodes;
    std::vector<double> twts;
    ball_quadrature(m, r, setup.ball_radial_nodes, setup.ball_angular_nodes, tnodes, twts);
    double val = 0.0;
    for (std::size_t b = 0; b < tnodes.size(); ++b) {
      val += twts[b] * integrate(
          [&](std::span<const double> s) {
            auto [flux, rhohat] = surface_flux_divergence(setup, z, tnodes[b], s);
            rep.max_abs_div_lift = std::max(rep.max_abs_div_lift,
                                            std::abs(flux / rhohat));
            return u_of_s.eval(s) * flux;
          },
          setup.surface.param_box, setup.quad).value;
    }
    rep.rhs_r.push_back(val / ball_volume(m, r));
  }

  rep.rhs_extrapolated = extrapolate_r2(radii, rep.rhs_r);
  rep.difference = std::abs(rep.lhs - rep.rhs_extrapolated);
  rep.observed_order = observed_order(radii, rep.rhs_r,
                                      1e-12 + 1e-10 * std::abs(rep.lhs));
  return rep;
}

IdentityReport restriction_check(const SurfaceSetup& setup, const VectorField& z,
                                 const Expression& surface_density,
                                 const Expression& h_of_t, int samples) {
  const StraighteningMap& chart = setup.surface.chart;
  int n = chart.dim, m = chart.codim, q = n - m;
  require(surface_density.dimension() == q,
          "surface density must be a function of the surface parameters");
  require(h_of_t.dimension() == m, "h must be a function of the m flow times");
  const ChartDomain& ambient = setup.volume.domain();

  // The construction needs the transversal fields to be the chart
  // coordinate flows; verify on a sample grid.
  for (const auto& st : grid_points(chart.chart_box, 3)) {
    Eigen::MatrixXd J = chart.jacobian(st);
    std::vector<double> x = chart.map_chart(st);
    for (int j = 0; j < m; ++j) {
      auto yv = setup.system.fields[static_cast<std::size_t>(j)].values(x);
      for (int i = 0; i < n; ++i)
        if (std::abs(yv[static_cast<std::size_t>(i)] - J(i, q + j)) >
            1e-6 * (1.0 + std::abs(J(i, q + j))))
          throw std::invalid_argument(
              "transversal fields are not the chart coordinate flows");
    }
  }

  DifferentialForm alpha = TransversalSystem::associated_form(chart, h_of_t, ambient);
  DifferentialForm dalpha = exterior_derivative(alpha);

  // Omega-tilde = (rho_S of s-hat) ds-hat_1 ^ ... ^ ds-hat_q.
  std::vector<Expression> shat(chart.inverse.begin(), chart.inverse.begin() + q);
  DifferentialForm omega_tilde =
      DifferentialForm::scalar(surface_density.compose(shat), ambient);
  for (int i = 0; i < q; ++i) {
    std::vector<Expression> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p)
      comps.push_back(shat[static_cast<std::size_t>(i)].derivative(p));
    omega_tilde = wedge(omega_tilde, DifferentialForm(1, std::move(comps), ambient));
  }
  DifferentialForm beta = wedge(omega_tilde, alpha);
  Expression beta_density = beta.component(0);

  // div is insensitive to the overall orientation sign; normalize so the
  // positivity check of the volume structure applies.
  {
    std::vector<double> center(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::size_t u = static_cast<std::size_t>(i);
      center[u] = 0.5 * (ambient.lo[u] + ambient.hi[u]);
    }
    if (beta_density.eval(center) < 0.0) beta_density = -beta_density;
  }
  VolumeStructure vs_beta(ScalarField(beta_density, ambient), 3);

  // Lift of Z in ambient coordinates: push the chart components (z(s), 0)
  // forward through g.
  std::vector<Expression> zamb;
  for (int i = 0; i < q; ++i) {
    Expression acc = Expression::constant(0.0, n);
    for (int p = 0; p < n; ++p)
      acc = acc + shat[static_cast<std::size_t>(i)].derivative(p) * z.component(p);
    zamb.push_back(std::move(acc));
  }
  std::vector<Expression> lift_comps;
  for (int p = 0; p < n; ++p) {
    Expression acc = Expression::constant(0.0, n);
    for (int i = 0; i < q; ++i) {
      std::vector<Expression> inv = chart.inverse;
      acc = acc + chart.forward[static_cast<std::size_t>(p)].derivative(i).compose(inv) *
                      zamb[static_cast<std::size_t>(i)];
    }
    lift_comps.push_back(std::move(acc));
  }
  VectorField lift(std::move(lift_comps), ambient);
  Expression div_lift = div_vector(lift, vs_beta);

  // Surface divergence in the parameters: zeta_i(s) = z chart components
  // restricted to t = 0, div_S = (1/rho_S) sum_i d(rho_S zeta_i)/ds_i.
  std::vector<Expression> g0;
  {
    std::vector<Expression> args;
    for (int i = 0; i < q; ++i) args.push_back(Expression::variable(i, q));
    for (int j = 0; j < m; ++j) args.push_back(Expression::constant(0.0, q));
    for (int p = 0; p < n; ++p)
      g0.push_back(chart.forward[static_cast<std::size_t>(p)].compose(args));
  }
  Expression div_surface = Expression::constant(0.0, q);
  for (int i = 0; i < q; ++i)
    div_surface = div_surface +
        (surface_density * zamb[static_cast<std::size_t>(i)].compose(g0)).derivative(i);
  div_surface = div_surface / surface_density;

  IdentityReport rep;
  rep.name = "restriction";
  std::mt19937_64 rng(setup.quad.seed + 0x5u);
  ChartDomain box = setup.surface.param_box.inner();
  std::vector<double> s(static_cast<std::size_t>(q));
  for (int k = 0; k < samples; ++k) {
    for (int i = 0; i < q; ++i) {
      std::size_t u = static_cast<std::size_t>(i);
      std::uniform_real_distribution<double> dist(box.lo[u], box.hi[u]);
      s[u] = dist(rng);
    }
    std::vector<double> x = setup.surface.point(s);
    if (dalpha.at(x).norm() > 1e-8 * (1.0 + alpha.at(x).norm()))
      throw std::runtime_error("associated form is not closed at " + format_point(x));
    double a = div_surface.eval(s);
    double b = div_lift.eval(x);
    double resid = std::abs(a - b);
    double scale = std::max(std::abs(a), std::abs(b));
    ++rep.samples;
    if (resid > rep.max_abs) {
      rep.max_abs = resid;
      rep.scale = scale;
      rep.worst_point.assign(s.begin(), s.end());
    }
    rep.max_rel = std::max(rep.max_rel, resid / std::max(scale, 1e-300));
  }
  return rep;
}

}  // namespace excal
