#include <benchmark/benchmark.h>

#include <random>

#include "excal/diver.hpp"
#include "excal/quad.hpp"

using namespace excal;

namespace {

AltTensor random_tensor(std::mt19937_64& rng, int n, int k, Variance var) {
  AltTensor t(n, k, var);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& c : t.components()) c = dist(rng);
  return t;
}

void bm_wedge(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  AltTensor a = random_tensor(rng, n, 2, Variance::Covector);
  AltTensor b = random_tensor(rng, n, 2, Variance::Covector);
  for (auto _ : state) benchmark::DoNotOptimize(wedge(a, b));
}
BENCHMARK(bm_wedge)->Arg(4)->Arg(6);

void bm_pairing(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  AltTensor w = random_tensor(rng, n, 3, Variance::Covector);
  AltTensor x = random_tensor(rng, n, 3, Variance::Vector);
  for (auto _ : state) benchmark::DoNotOptimize(pair(w, x));
}
BENCHMARK(bm_pairing)->Arg(4)->Arg(6);

void bm_interior(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  AltTensor w = random_tensor(rng, n, 3, Variance::Covector);
  AltTensor x = random_tensor(rng, n, 2, Variance::Vector);
  for (auto _ : state) benchmark::DoNotOptimize(interior_by_multivector(w, x));
}
BENCHMARK(bm_interior)->Arg(4)->Arg(6);

void bm_div_strong_build(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  ChartDomain dom(std::vector<double>(static_cast<std::size_t>(n), -2.0),
                  std::vector<double>(static_cast<std::size_t>(n), 2.0), 0.2);
  Expression q = Expression::constant(0.0, n);
  for (int i = 0; i < n; ++i) {
    Expression xi = Expression::variable(i, n);
    q = q + xi * xi;
  }
  VolumeStructure vs(ScalarField((-(q / Expression::constant(2.0, n))).apply(Func::Exp), dom));
  std::vector<VectorField> factors;
  for (int i = 0; i < 2; ++i) {
    std::vector<Expression> comps;
    for (int j = 0; j < n; ++j)
      comps.push_back(Expression::variable((i + j) % n, n).apply(Func::Sin));
    factors.emplace_back(std::move(comps), dom);
  }
  MultiVectorField z = MultiVectorField::decomposable(Expression::constant(1.0, n),
                                                      factors, dom);
  for (auto _ : state) benchmark::DoNotOptimize(div_strong(z, vs));
}
BENCHMARK(bm_div_strong_build)->Arg(3)->Arg(4);

void bm_div_strong_eval(benchmark::State& state) {
  int n = 3;
  ChartDomain dom({-2, -2, -2}, {2, 2, 2}, 0.2);
  VolumeStructure vs(ScalarField(
      Expression::parse("exp(0 - (x0^2 + x1^2 + x2^2)/2)", n), dom));
  MultiVectorField z = MultiVectorField::decomposable(
      Expression::parse("x0/3 + 2", n),
      {VectorField::parse({"sin(x1)", "x0*x2", "exp(x0/4)"}, dom),
       VectorField::parse({"x2^2", "1", "cos(x0)"}, dom)},
      dom);
  MultiVectorField d = div_strong(z, vs);
  std::vector<double> p{0.3, -0.7, 1.1};
  for (auto _ : state) benchmark::DoNotOptimize(d.at_components(p));
}
BENCHMARK(bm_div_strong_eval);

void bm_integrate_grid(benchmark::State& state) {
  ChartDomain box({-2.0, -2.0}, {2.0, 2.0});
  QuadratureSpec q;
  q.nodes_per_axis = static_cast<int>(state.range(0));
  auto f = [](std::span<const double> p) {
    return std::exp(-(p[0] * p[0] + p[1] * p[1]) / 2.0);
  };
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, box, q));
}
BENCHMARK(bm_integrate_grid)->Arg(16)->Arg(32);

void bm_integrate_ball(benchmark::State& state) {
  std::vector<double> center{0.0, 0.0, 0.0};
  auto f = [](std::span<const double> p) {
    return std::exp(-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 2.0);
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_ball(f, center, 1.5, 12, 24));
}
BENCHMARK(bm_integrate_ball);

}  // namespace

BENCHMARK_MAIN();
