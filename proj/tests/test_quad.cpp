#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "excal/quad.hpp"

using namespace excal;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {2, 4, 8}) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    double wsum = 0.0;
    for (double v : w) wsum += v;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // integral of t^(2n-2) over [-1,1]
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += w[static_cast<std::size_t>(i)] *
             std::pow(x[static_cast<std::size_t>(i)], 2 * n - 2);
    CHECK(acc == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
  }
}

TEST_CASE("grid integration reproduces the gaussian normalization") {
  ChartDomain box({-8.0, -8.0}, {8.0, 8.0}, 0.5);
  QuadratureSpec q;
  q.nodes_per_axis = 40;
  q.panels = 4;
  auto r = integrate(
      [](std::span<const double> p) {
        return std::exp(-(p[0] * p[0] + p[1] * p[1]) / 2.0) / (2.0 * kPi);
      },
      box, q);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.error < 1e-10);
}

TEST_CASE("monte carlo is seeded and statistically consistent") {
  ChartDomain box({0.0, 0.0}, {1.0, 1.0});
  QuadratureSpec q;
  q.mode = QuadratureSpec::Mode::MonteCarlo;
  q.samples = 40000;
  q.seed = 99;
  auto f = [](std::span<const double> p) { return p[0] * p[0] + p[1]; };
  auto a = integrate(f, box, q);
  auto b = integrate(f, box, q);
  CHECK(a.value == b.value);  // identical seed, identical estimate
  CHECK(std::abs(a.value - (1.0 / 3.0 + 0.5)) < 5.0 * a.error);
  q.seed = 100;
  auto c = integrate(f, box, q);
  CHECK(a.value != c.value);
}

TEST_CASE("1-d integration") {
  auto r = integrate_1d([](double t) { return std::cos(t); }, 0.0, 1.0, 16);
  CHECK(r.value == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
}

TEST_CASE("ball volumes match the closed form") {
  CHECK(ball_volume(1, 0.5) == doctest::Approx(1.0));
  CHECK(ball_volume(2, 2.0) == doctest::Approx(kPi * 4.0));
  CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(ball_volume(4, 1.0) == doctest::Approx(kPi * kPi / 2.0));
}

TEST_CASE("ball quadrature weights sum to the ball volume") {
  for (int m = 1; m <= 4; ++m) {
    std::vector<std::vector<double>> nodes;
    std::vector<double> wts;
    ball_quadrature(m, 0.7, 12, 24, nodes, wts);
    double sum = 0.0;
    for (std::size_t i = 0; i < wts.size(); ++i) {
      sum += wts[i];
      double r2 = 0.0;
      for (double c : nodes[i]) r2 += c * c;
      CHECK(r2 < 0.49 * (1.0 + 1e-12));
    }
    CHECK(sum == doctest::Approx(ball_volume(m, 0.7)).epsilon(1e-12));
  }
}

TEST_CASE("ball integration is exact on smooth integrands") {
  // int over ball radius 1 in 3d of x^2 = (4 pi / 3) * (3/5) * (1/3)... use
  // spherical moments: int x0^2 = (1/3) int r^2 = (1/3) * 4pi/5 = 4pi/15.
  std::vector<double> center{0.0, 0.0, 0.0};
  auto r = integrate_ball(
      [](std::span<const double> p) { return p[0] * p[0]; }, center, 1.0, 16, 32);
  CHECK(r.value == doctest::Approx(4.0 * kPi / 15.0).epsilon(1e-12));

  // off-center constant
  std::vector<double> c2{1.0, -2.0};
  auto r2 = integrate_ball([](std::span<const double>) { return 3.0; }, c2, 0.5, 8, 16);
  CHECK(r2.value == doctest::Approx(3.0 * ball_volume(2, 0.5)).epsilon(1e-12));
}

TEST_CASE("bump profile is 1 at the center and C1 at the seam") {
  Bump b{{0.5, -0.25}, 0.8};
  Expression e = b.expression(2);
  std::vector<double> center{0.5, -0.25};
  CHECK(e.eval(center) == doctest::Approx(1.0));
  // value and gradient at the seam
  std::vector<double> seam{0.5 + 0.8, -0.25};
  CHECK(e.eval(seam) == 0.0);
  double h = 1e-7;
  std::vector<double> in{0.5 + 0.8 - h, -0.25};
  std::vector<double> out{0.5 + 0.8 + h, -0.25};
  CHECK(std::abs(e.eval(in) - e.eval(out)) / (2 * h) < 1e-6);
  // exact gradient from the jet evaluation also vanishes at the seam
  auto [v, g] = e.eval_grad(seam);
  (void)v;
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(0.0));
}

TEST_CASE("bump forms vanish with their derivative outside the ball") {
  ChartDomain dom({-3.0, -3.0, -3.0}, {3.0, 3.0, 3.0}, 0.1);
  DifferentialForm w = make_bump_form(1, {0.0, 0.0, 0.0}, 1.0, {{0}, {2}}, dom);
  DifferentialForm dw = exterior_derivative(w);
  std::vector<double> outside{1.5, 1.5, 0.0};
  CHECK(w.at(outside).is_zero());
  CHECK(dw.at(outside).is_zero());
  std::vector<double> center{0.0, 0.0, 0.0};
  CHECK(w.at(center)[MultiIndex{0}] == doctest::Approx(1.0));
  CHECK(w.at(center)[MultiIndex{1}] == 0.0);
}

TEST_CASE("bump support must sit strictly inside the domain") {
  ChartDomain dom({-1.0, -1.0}, {1.0, 1.0});
  CHECK_THROWS_AS(make_bump_form(0, {0.5, 0.0}, 0.8, {{}}, dom),
                  std::invalid_argument);
}
