#include <doctest.h>

#include <cmath>

#include "gmk/errors.hpp"
#include "gmk/generators.hpp"

using namespace gmk;

TEST_CASE("generators") {
  const AtomicMeasure dust = cantor_dust(3);
  CHECK(dust.size() == 64);
  for (const Atom& a : dust) CHECK(a.w == 1.0 / 64);
  const AtomicMeasure grid = grid_lebesgue(2, 64);
  CHECK(grid.size() == 4096);
  CHECK(grid.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  const PolylineCurve k = koch_curve(4);
  CHECK(k.segments() == 256);
  for (std::size_t i = 0; i + 1 < k.vertices.size(); ++i)
    CHECK((k.vertices[i + 1] - k.vertices[i]).norm() == doctest::Approx(std::pow(3.0, -4)).epsilon(1e-12));
  CHECK((k.vertices.back() - Point(Eigen::Vector2d(1, 0))).norm() <= 1e-12);
  CHECK(sierpinski_carpet(2).size() == 64);
  const std::vector<double> c = middle_thirds_cantor(2);
  const std::vector<double> want{1.0 / 18, 1.0 / 3 - 1.0 / 18, 2.0 / 3 + 1.0 / 18, 1 - 1.0 / 18};
  REQUIRE(c.size() == want.size());
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-14));
  CHECK_THROWS_AS(cantor_dust(8), ResourceError);
  CHECK_THROWS_AS(grid_lebesgue(2, 513), ResourceError);
}
