#include <benchmark/benchmark.h>

#include <random>

#include "gmk/decomposition.hpp"
#include "gmk/exterior.hpp"
#include "gmk/generators.hpp"
#include "gmk/nondiff.hpp"
#include "gmk/parallel.hpp"
#include "gmk/perturbation.hpp"

using namespace gmk;

static void BM_InteriorProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  KVector v(n, n / 2);
  KCovector a(n, 1);
  for (int i = 0; i < v.size(); ++i) v[i] = g(rng);
  for (int i = 0; i < a.size(); ++i) a[i] = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(interior_product(v, a));
}
BENCHMARK(BM_InteriorProduct)->Arg(4)->Arg(6)->Arg(8);

static void BM_Smirnov(benchmark::State& state) {
  const PolylineCurrent1 t = current_from_curve(circle_curve(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(smirnov_decompose(t));
}
BENCHMARK(BM_Smirnov)->Arg(360)->Arg(4096);

static void BM_ConeCurve(benchmark::State& state) {
  const AtomicMeasure mu = cantor_dust(static_cast<int>(state.range(0)));
  const ConeSpec cone(Eigen::Vector2d(1, 1), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(cone_curve_extract(mu, cone, 1e-9, 2.0));
}
BENCHMARK(BM_ConeCurve)->Arg(3)->Arg(4);

static void BM_BundleLebesgue(benchmark::State& state) {
  const AtomicMeasure mu = grid_lebesgue(2, static_cast<int>(state.range(0)));
  const auto net = default_cone_net(2);
  for (auto _ : state) benchmark::DoNotOptimize(decomposability_bundle(mu, {}, {}, net));
}
BENCHMARK(BM_BundleLebesgue)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_PerturbationCantor(benchmark::State& state) {
  std::vector<Point> k;
  for (double a : middle_thirds_cantor(5)) k.push_back(Eigen::Vector2d(a, 0.5));
  const double h = 1.0 / static_cast<double>(state.range(0));
  const GridSpec grid = GridSpec::covering(Eigen::Vector2d(0, 0.5), Eigen::Vector2d(1, 0.5), h, 0.1);
  const ConeSpec cone(Eigen::Vector2d(0, 1), 0.5235987755982988);
  for (auto _ : state) benchmark::DoNotOptimize(perturbation_g(k, cone, 0.05, grid));
}
BENCHMARK(BM_PerturbationCantor)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_AssembleDust(benchmark::State& state) {
  set_num_threads(static_cast<int>(state.range(1)));
  const AtomicMeasure mu = cantor_dust(static_cast<int>(state.range(0)));
  const Bundle b(mu.size(), Subspace::zero(2));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_nondiff(mu, b, 3));
}
BENCHMARK(BM_AssembleDust)->Args({4, 1})->Args({4, 8})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
