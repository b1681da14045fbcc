// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Each criterion carries its tolerance and a wall-clock
// budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "excal/surface.hpp"
#include "runner.hpp"
#include "test_util.hpp"

using namespace excal;
using namespace testutil;

namespace {

int failures = 0;

class Criterion {
public:
  Criterion(int number, std::string label, double budget_seconds)
      : number_(number), label_(std::move(label)), budget_(budget_seconds),
        start_(std::chrono::steady_clock::now()) {}

  void finish(bool ok, const std::string& detail) {
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    bool in_budget = elapsed < budget_;
    bool pass = ok && in_budget;
    if (!pass) ++failures;
    std::printf("[%s] criterion %2d: %s | %s | %.2fs (budget %.0fs)%s\n",
                pass ? "PASS" : "FAIL", number_, label_.c_str(), detail.c_str(),
                elapsed, budget_, in_budget ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }

private:
  int number_;
  std::string label_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
};

double rel(double lhs, double rhs) {
  return std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}

constexpr double kTwoPi = 6.28318530717958647692;
const char* kGauss2 = "exp(0 - (x0^2 + x1^2)/2) / 6.28318530717958647692";

SurfaceSetup flat_setup() {
  ChartDomain ambient({-2, -2}, {2, 2}, 0.1);
  StraighteningMap chart;
  chart.dim = 2;
  chart.codim = 1;
  chart.forward = {Expression::parse("x0", 2), Expression::parse("x1", 2)};
  chart.inverse = chart.forward;
  chart.chart_box = ChartDomain({-1.5, -0.5}, {1.5, 0.5});
  ElementarySurface surf{chart, ChartDomain({-1.0}, {1.0}, 0.1), 0.0};
  TransversalSystem sys;
  sys.fields = {VectorField::basis(1, ambient)};
  sys.alpha = TransversalSystem::associated_form(chart, Expression::parse("1", 1), ambient);
  FlowEngine eng{1e-3, 10000000, ambient};
  QuadratureSpec q;
  q.nodes_per_axis = 32;
  return SurfaceSetup{surf, sys, eng,
                      VolumeStructure(ScalarField(Expression::parse("1", 2), ambient)),
                      q, 12, 16};
}

SurfaceSetup circle_setup() {
  ChartDomain ambient({-3, -3}, {3, 3}, 0.1);
  StraighteningMap chart;
  chart.dim = 2;
  chart.codim = 1;
  chart.forward = {Expression::parse("exp(x1)*cos(x0)", 2),
                   Expression::parse("exp(x1)*sin(x0)", 2)};
  chart.chart_box = ChartDomain({0.0, -0.5}, {kTwoPi, 0.5});
  ElementarySurface surf{chart, ChartDomain({0.0}, {kTwoPi}, 0.0), 0.0};
  TransversalSystem sys;
  sys.fields = {VectorField::parse({"x0", "x1"}, ambient)};
  FlowEngine eng{1e-3, 10000000, ambient};
  QuadratureSpec q;
  q.nodes_per_axis = 32;
  return SurfaceSetup{surf, sys, eng,
                      VolumeStructure(ScalarField(Expression::parse(kGauss2, 2), ambient)),
                      q, 12, 16};
}

const std::vector<double> kRadii{0.2, 0.1, 0.05, 0.025};

// 1: tensor-level adjunctions, 500 trials per (n, k, m), n <= 5.
void criterion1() {
  Criterion c(1, "adjunctions <i_X w, Z> = <w, X^Z> and <eta, j_w X> = <w^eta, X>, rel 1e-12", 5);
  std::mt19937_64 rng(101);
  double worst = 0.0;
  long cases = 0;
  for (int n = 2; n <= 5; ++n) {
    for (int k = 1; k <= n; ++k)
      for (int m = 1; m <= k; ++m)
        for (int t = 0; t < 500; ++t) {
          AltTensor w = random_tensor(rng, n, k, Variance::Covector);
          AltTensor x = random_tensor(rng, n, m, Variance::Vector);
          AltTensor z = random_tensor(rng, n, k - m, Variance::Vector);
          worst = std::max(worst, rel(pair(interior_by_multivector(w, x), z),
                                      pair(w, wedge(x, z))));
          ++cases;
        }
    for (int m = 1; m <= n; ++m)
      for (int k = 0; k <= m; ++k)
        for (int t = 0; t < 500; ++t) {
          AltTensor w = random_tensor(rng, n, k, Variance::Covector);
          AltTensor eta = random_tensor(rng, n, m - k, Variance::Covector);
          AltTensor x = random_tensor(rng, n, m, Variance::Vector);
          worst = std::max(worst, rel(pair(eta, interior_by_form(w, x)),
                                      pair(wedge(w, eta), x)));
          ++cases;
        }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max rel %.2e over %ld cases", worst, cases);
  c.finish(worst <= 1e-12, buf);
}

// 2: lemma 1 and the auxiliary flat identity, 100 configs each, 50 points.
void criterion2() {
  Criterion c(2, "lemma 1 and i_{j(w)X} Omega = (-1)^{k(m+1)} w ^ i_X Omega, rel 1e-10", 10);
  std::mt19937_64 rng(102);
  double worst = 0.0;
  int configs = 0;
  for (int round = 0; round < 40 && configs < 100; ++round)
    for (int n = 2; n <= 4 && configs < 100; ++n) {
      ChartDomain dom = cube(n);
      VolumeStructure vs = gaussian_volume(dom);
      int k = 1 + (configs % n);
      worst = std::max(worst,
                       check_lemma1(random_form(rng, dom, k),
                                    random_decomposable(rng, dom, k), vs,
                                    random_points(rng, dom, 50)).max_rel);
      int m = 1 + (configs % n);
      int ka = configs % (m + 1);
      worst = std::max(worst,
                       check_aux(random_form(rng, dom, ka),
                                 random_decomposable(rng, dom, m), vs,
                                 random_points(rng, dom, 50)).max_rel);
      ++configs;
    }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max rel %.2e over %d configs", worst, configs);
  c.finish(worst <= 1e-10, buf);
}

// 3: div_strong == div_recursive, 100 configs x 50 points, n <= 5.
void criterion3() {
  Criterion c(3, "div_strong == div_recursive on random decomposables, rel 1e-8", 30);
  std::mt19937_64 rng(103);
  double worst = 0.0;
  int configs = 0;
  while (configs < 100)
    for (int n = 2; n <= 5 && configs < 100; ++n) {
      ChartDomain dom = cube(n);
      for (const auto& vs : {gaussian_volume(dom), uniform_volume(dom)}) {
        if (configs >= 100) break;
        int k = 1 + (configs % n);
        worst = std::max(worst,
                         check_operator_agreement(random_decomposable(rng, dom, k), vs,
                                                  random_points(rng, dom, 50)).max_rel);
        ++configs;
      }
    }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max rel %.2e over %d configs", worst, configs);
  c.finish(worst <= 1e-8, buf);
}

// 4: weak-divergence consistency and the corruption probe, n = 3.
void criterion4() {
  Criterion c(4, "weak divergence: residual <= 1e-6 * scale, corrupted > 1e-3", 60);
  ChartDomain dom({-4, -4, -4}, {4, 4, 4}, 0.3);
  VolumeStructure vs(ScalarField(
      Expression::parse("exp(0 - (x0^2 + x1^2 + x2^2)/2)", 3), dom));
  Bump bump{{0.2, -0.1, 0.3}, 2.5};
  QuadratureSpec q;
  q.nodes_per_axis = 20;
  std::mt19937_64 rng(104);

  double worst = 0.0;
  bool ok = true;
  for (int k = 1; k <= 3; ++k) {
    MultiVectorField z = random_decomposable(rng, dom, k);
    MultiVectorField w = div_strong(z, vs);
    const auto& mis = multi_indices(3, k - 1);
    std::vector<MultiIndex> sel(mis.begin(),
                                mis.begin() + std::min<std::size_t>(2, mis.size()));
    DifferentialForm omega = make_bump_form(k - 1, bump.center, bump.radius, sel, dom);
    WeakDivResult res = weak_div_residual(z, w, omega, vs, q, bump);
    ok = ok && res.residual <= 1e-6 * res.scale;
    worst = std::max(worst, res.residual / res.scale);
  }

  // corrupted candidate div Z + e1 for a bivector field
  MultiVectorField z2 = random_decomposable(rng, dom, 2);
  MultiVectorField bad = add(div_strong(z2, vs),
                             MultiVectorField::decomposable(
                                 Expression::constant(1.0, 3),
                                 {VectorField::basis(0, dom)}, dom));
  DifferentialForm witness = make_bump_form(1, bump.center, bump.radius, {{0}}, dom);
  WeakDivResult probe = weak_div_residual(z2, bad, witness, vs, q, bump);
  double probe_rel = probe.residual / probe.scale;
  ok = ok && probe_rel > 1e-3;

  char buf[128];
  std::snprintf(buf, sizeof buf, "max rel %.2e, corrupted rel %.2e", worst, probe_rel);
  c.finish(ok, buf);
}

// 5: j-Leibniz rule on 100 random (w, Z) with k < m, n <= 4.
void criterion5() {
  Criterion c(5, "div(j(w)Z) = (-1)^k j(dw)Z + (-1)^k j(w) div Z, rel 1e-9", 20);
  std::mt19937_64 rng(105);
  double worst = 0.0;
  int configs = 0;
  while (configs < 100)
    for (int n = 2; n <= 4 && configs < 100; ++n) {
      ChartDomain dom = cube(n);
      VolumeStructure vs = gaussian_volume(dom);
      for (int m = 2; m <= n && configs < 100; ++m)
        for (int k = 1; k < m && configs < 100; ++k) {
          worst = std::max(worst,
                           check_leibniz_j(random_form(rng, dom, k),
                                           random_decomposable(rng, dom, m), vs,
                                           random_points(rng, dom, 10)).max_rel);
          ++configs;
        }
    }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max rel %.2e over %d configs", worst, configs);
  c.finish(worst <= 1e-9, buf);
}

// 6: flat surface-measure oracle sigma_r = L.
void criterion6() {
  Criterion c(6, "flat oracle: sigma_r = L for every r and extrapolated, 1e-10", 5);
  SurfaceSetup flat = flat_setup();
  auto rep = surface_measure(flat, kRadii);
  bool ok = true;
  double worst = 0.0;
  for (double s : rep.sigma_r) {
    worst = std::max(worst, std::abs(s - 2.0));
    ok = ok && std::abs(s - 2.0) <= 1e-10;
  }
  ok = ok && std::abs(rep.sigma_extrapolated - 2.0) <= 1e-10;
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |sigma_r - L| %.2e, extrapolated err %.2e",
                worst, std::abs(rep.sigma_extrapolated - 2.0));
  c.finish(ok, buf);
}

// 7: gaussian circle sigma = e^{-1/2}.
void criterion7() {
  Criterion c(7, "gaussian circle: sigma = exp(-1/2) within 1e-4, direct 1e-8", 60);
  SurfaceSetup circ = circle_setup();
  auto rep = surface_measure(circ, kRadii);
  double oracle = std::exp(-0.5);
  double e1 = std::abs(rep.sigma_extrapolated - oracle);
  double e2 = std::abs(rep.sigma_direct - oracle);
  char buf[128];
  std::snprintf(buf, sizeof buf, "extrapolated err %.2e, direct err %.2e", e1, e2);
  c.finish(e1 <= 1e-4 && e2 <= 1e-8, buf);
}

// 8: tube averages for u in {1, x0^2, bump} on both configurations.
void criterion8() {
  Criterion c(8, "tube averages of {1, x0^2, bump} within 1e-4, order >= 1", 60);
  bool ok = true;
  double worst = 0.0;
  double min_order = 1e9;
  for (int which = 0; which < 2; ++which) {
    SurfaceSetup setup = which == 0 ? flat_setup() : circle_setup();
    const ChartDomain& dom = setup.volume.domain();
    std::vector<Expression> us{
        Expression::constant(1.0, 2), Expression::parse("x0^2", 2),
        Bump{which == 0 ? std::vector<double>{0.0, 0.0} : std::vector<double>{1.0, 0.0},
             1.5}.expression(2)};
    for (const auto& u : us) {
      auto rep = lemma3_average(setup, ScalarField(u, dom), kRadii);
      double err = std::abs(rep.extrapolated - rep.direct);
      worst = std::max(worst, err);
      min_order = std::min(min_order, rep.observed_order);
      ok = ok && err <= 1e-4 && rep.observed_order >= 1.0;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |avg - oracle| %.2e, min observed order %.2f",
                worst, min_order);
  c.finish(ok, buf);
}

// 9: tube-limit identity for the surface divergence.
void criterion9() {
  Criterion c(9, "surface-divergence tube limit: flat 1e-4, circle both sides 1e-6", 120);
  SurfaceSetup flat = flat_setup();
  VectorField zf = VectorField::parse({"x0", "0"}, flat.volume.domain());
  Bump ub{{0.0}, 0.8};
  auto rf = theorem2_check(flat, zf, ub.expression(1), kRadii);

  SurfaceSetup circ = circle_setup();
  VectorField rot = VectorField::parse({"0 - x1", "x0"}, circ.volume.domain());
  auto rc = theorem2_check(circ, rot, Expression::constant(1.0, 1), kRadii);

  bool ok = rf.difference <= 1e-4 && std::abs(rc.lhs) <= 1e-6 &&
            std::abs(rc.rhs_extrapolated) <= 1e-6;
  char buf[128];
  std::snprintf(buf, sizeof buf, "flat diff %.2e, circle |lhs| %.2e |rhs| %.2e",
                rf.difference, std::abs(rc.lhs), std::abs(rc.rhs_extrapolated));
  c.finish(ok, buf);
}

// 10: restriction identity with a closed associated form, 50 samples.
void criterion10() {
  Criterion c(10, "restriction: div w.r.t. beta matches div_S, 1e-6 at 50 samples", 60);
  SurfaceSetup flat = flat_setup();
  VectorField zf = VectorField::parse({"x0", "0"}, flat.volume.domain());
  auto r1 = restriction_check(flat, zf, Expression::parse("exp(0 - x0^2/2)", 1),
                              Expression::parse("1", 1), 50);

  ChartDomain ambient({0.4, -1.5}, {2.5, 1.5}, 0.05);
  StraighteningMap chart;
  chart.dim = 2;
  chart.codim = 1;
  chart.forward = {Expression::parse("exp(x1)", 2), Expression::parse("x0*exp(x1)", 2)};
  chart.inverse = {Expression::parse("x1/x0", 2), Expression::parse("log(x0)", 2)};
  chart.chart_box = ChartDomain({-1.0, -0.4}, {1.0, 0.4});
  ElementarySurface surf{chart, ChartDomain({-0.8}, {0.8}, 0.1), 0.0};
  TransversalSystem sys;
  sys.fields = {VectorField::parse({"x0", "x1"}, ambient)};
  sys.alpha = TransversalSystem::associated_form(
      chart, Expression::parse("1 + x0^2/2", 1), ambient);
  FlowEngine eng{1e-3, 10000000, ambient};
  QuadratureSpec q;
  SurfaceSetup radial{surf, sys, eng,
                      VolumeStructure(ScalarField(Expression::parse(kGauss2, 2), ambient)),
                      q, 12, 16};
  VectorField zr = VectorField::parse({"0", "sin(x1)"}, ambient);
  auto r2 = restriction_check(radial, zr, Expression::parse("exp(0 - x0^2/2)", 1),
                              Expression::parse("1 + x0^2/2", 1), 50);

  char buf[128];
  std::snprintf(buf, sizeof buf, "product max %.2e, radial max %.2e", r1.max_abs,
                r2.max_abs);
  c.finish(r1.max_abs <= 1e-6 && r2.max_abs <= 1e-6, buf);
}

// 11: byte-identical reports for identical config and seed.
void criterion11() {
  Criterion c(11, "determinism: identical (config, seed) gives identical JSON", 60);
  std::ifstream in(std::string(EXCAL_CONFIG_DIR) + "/default.json", std::ios::binary);
  bool readable = in.is_open();
  std::ostringstream text;
  text << in.rdbuf();
  excal::tool::RunOptions opt;
  opt.mode = "check";
  auto a = excal::tool::run_config(text.str(), opt);
  auto b = excal::tool::run_config(text.str(), opt);
  bool ok = readable && a.exit_code == 0 && b.exit_code == 0 && a.report == b.report;
  char buf[128];
  std::snprintf(buf, sizeof buf, "exit %d/%d, %s", a.exit_code, b.exit_code,
                a.report == b.report ? "byte-identical" : "reports differ");
  c.finish(ok, buf);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
