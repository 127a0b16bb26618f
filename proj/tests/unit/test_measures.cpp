#include <doctest.h>

#include <cmath>
#include <random>

#include "gmk/measures.hpp"

using namespace gmk;

namespace {

PolylineCurve segment(double x0, double y0, double x1, double y1, double mult = 1.0) {
  return {{Eigen::Vector2d(x0, y0), Eigen::Vector2d(x1, y1)}, mult};
}

PolylineCurve ngon(int k) {
  PolylineCurve c;
  for (int i = 0; i <= k; ++i) {
    const double t = 2 * M_PI * (i % k) / k;
    c.vertices.push_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
  }
  return c;
}

}  // namespace

TEST_CASE("h1_measure") {
  const AtomicMeasure mu = h1_measure(segment(0, 0, 1, 0), 0.25);
  REQUIRE(mu.size() == 4);
  for (const Atom& a : mu) CHECK(a.w == 0.25);
  CHECK(mu[0].x[0] == 0.125);

  const AtomicMeasure circ = h1_measure(ngon(360), 0.01);
  CHECK(circ.total_mass() == doctest::Approx(720 * std::sin(M_PI / 360)).epsilon(1e-12));

  CHECK(h1_measure(PolylineCurve{}, 0.1).empty());
  CHECK(h1_measure(segment(0, 0, 2, 0, -3), 0.5).total_mass() == doctest::Approx(6.0));
}

TEST_CASE("h1_measure refinement") {
  const PolylineCurve c = ngon(7);
  const AtomicMeasure coarse = h1_measure(c, 0.2);
  const AtomicMeasure fine = h1_measure(c, 0.1);
  CHECK(std::abs(coarse.total_mass() - fine.total_mass()) <= 1e-12);
  auto upper = [](const Point& x) { return x[1] > 0.3; };
  const double piece = 0.2;
  CHECK(std::abs(restrict(coarse, upper).total_mass() - restrict(fine, upper).total_mass()) <= piece + 1e-12);
}

TEST_CASE("integrate_family") {
  CurveFamily two{2, {{0.5, segment(0, 0, 1, 0)}, {0.5, segment(0, 1, 1, 1)}}};
  CHECK(integrate_family(two, 0.1).total_mass() == doctest::Approx(1.0).epsilon(1e-14));

  CurveFamily single{2, {{1.0, segment(0, 0, 1, 0)}}};
  const AtomicMeasure a = integrate_family(single, 0.3);
  const AtomicMeasure b = h1_measure(segment(0, 0, 1, 0), 0.3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].w == b[i].w);
    CHECK(a[i].x == b[i].x);
  }

  const int m = 32;
  CurveFamily fill{2, {}};
  double expected = 0.0;
  for (int j = 0; j < m; ++j) {
    fill.members.push_back({1.0 / m, segment(0, (j + 0.5) / m, 1, (j + 0.5) / m, 1.5)});
    expected += 1.0 / m * 1.5;
  }
  CHECK(std::abs(integrate_family(fill, 1.0 / m).total_mass() - expected) <= 1e-12);

  CurveFamily overlap{2, {{1.0, segment(0, 0, 1, 0)}, {2.0, segment(0, 0, 1, 0)}}};
  const AtomicMeasure merged = integrate_family(overlap, 0.5);
  CHECK(merged.size() == 2);
  CHECK(merged[0].w == doctest::Approx(1.5));
}

TEST_CASE("restrict") {
  AtomicMeasure grid(2);
  const int m = 10;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) grid.add(Eigen::Vector2d((i + 0.5) / m, (j + 0.5) / m), 1.0 / (m * m));
  CHECK(restrict(grid, [](const Point&) { return true; }).size() == grid.size());
  CHECK(restrict(grid, [](const Point&) { return false; }).empty());
  const double half = restrict(grid, [](const Point& x) { return x[0] < 0.5; }).total_mass();
  CHECK(std::abs(half - 0.5) <= 1.0 / (m * m));
}

TEST_CASE("pushforward_measure") {
  const AtomicMeasure mu = h1_measure(segment(0, 0, 1, 0), 0.1);
  const AtomicMeasure id = pushforward_measure(mu, [](const Point& x) { return x; });
  CHECK(id.size() == mu.size());
  CHECK(id.total_mass() == mu.total_mass());
  const AtomicMeasure shifted = pushforward_measure(mu, [](const Point& x) { return Point(x + Eigen::Vector2d(3, 1)); });
  CHECK(shifted[2].x[0] == doctest::Approx(mu[2].x[0] + 3));
  CHECK(shifted[2].w == mu[2].w);
  const AtomicMeasure crushed = pushforward_measure(mu, [](const Point&) { return Point(Eigen::Vector2d(0, 0)); });
  REQUIRE(crushed.size() == 1);
  CHECK(crushed[0].w == doctest::Approx(mu.total_mass()).epsilon(1e-15));
}

TEST_CASE("radon_nikodym") {
  const Point x = Eigen::Vector2d(0.2, 0.3), y = Eigen::Vector2d(0.7, 0.1);
  const KVector e1 = KVector::basis(2, make_multi_index({1}));
  const KVector e2 = KVector::basis(2, make_multi_index({2}));

  VectorAtomMeasure t(2, 1);
  t.add(x, e1 * 2.0);
  AtomicMeasure mu(2);
  mu.add(x, 1.0);
  RadonNikodym rn = radon_nikodym(t, mu);
  CHECK(rn.density[0][0] == 2.0);
  CHECK(rn.singular.empty());

  VectorAtomMeasure away(2, 1);
  away.add(y, e1);
  rn = radon_nikodym(away, mu);
  CHECK(rn.density[0].is_zero());
  CHECK(rn.singular.size() == 1);

  VectorAtomMeasure both(2, 1);
  both.add(x, e1);
  both.add(y, e2);
  AtomicMeasure half(2);
  half.add(x, 0.5);
  rn = radon_nikodym(both, half);
  CHECK(rn.density[0][0] == 2.0);
  REQUIRE(rn.singular.size() == 1);
  CHECK(rn.singular[0].v[1] == 1.0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  VectorAtomMeasure rt(2, 1);
  AtomicMeasure rmu(2);
  for (int i = 0; i < 500; ++i) {
    const Point p = Eigen::Vector2d(i * 0.01, 0.0);
    KVector v(2, 1);
    v[0] = u(rng);
    v[1] = -u(rng);
    rt.add(p, v);
    rmu.add(p, u(rng));
  }
  rn = radon_nikodym(rt, rmu);
  int exact = 0;
  for (std::size_t i = 0; i < rt.size(); ++i)
    for (int c = 0; c < 2; ++c) {
      const double back = rn.density[i][c] * rmu[i].w;
      CHECK(std::abs(rt[i].v[c] - back) <= std::abs(rt[i].v[c]) * 0x1p-52);
      exact += back == rt[i].v[c];
    }
  CHECK(exact > 500);
}
