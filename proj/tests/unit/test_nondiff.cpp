#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gmk/decomposition.hpp"
#include "gmk/errors.hpp"
#include "gmk/generators.hpp"
#include "gmk/grid_field.hpp"
#include "gmk/nondiff.hpp"
#include "gmk/perturbation.hpp"
#include "gmk/quotients.hpp"
#include "gmk/smoothing.hpp"

using namespace gmk;

namespace {

Point p2(double a, double b) { return Eigen::Vector2d(a, b); }

double brute_distance(const Point& x, const std::vector<Point>& k) {
  double d = std::numeric_limits<double>::infinity();
  for (const Point& y : k) d = std::min(d, (x - y).norm());
  return d;
}

std::vector<Point> cantor_on_line(int depth, double y) {
  std::vector<Point> out;
  for (double a : middle_thirds_cantor(depth)) out.push_back(p2(a, y));
  return out;
}

Subspace x_axis() { return Subspace::from_columns(Eigen::MatrixXd(Point::Unit(2, 0))); }

}  // namespace

TEST_CASE("grid spec indexing and covering") {
  const GridSpec g = GridSpec::covering(p2(0.1, -0.2), p2(0.5, 0.3), 0.125, 0.0);
  CHECK(g.origin[0] == doctest::Approx(0.0));
  CHECK(g.origin[1] == doctest::Approx(-0.25));
  CHECK(g.shape[0] == 5);
  CHECK(g.shape[1] == 6);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.index(g.coords(i)) == i);
  CHECK(g.contains(p2(0.5, 0.375)));
  CHECK_FALSE(g.contains(p2(0.51, 0.0)));
  const Index3 c = g.nearest(p2(0.26, 0.13));
  CHECK(c[0] == 2);
  CHECK(c[1] == 3);
  CHECK_THROWS_AS(GridSpec(p2(0, 0), 1.0, {1 << 14, 1 << 13}), ResourceError);
}

TEST_CASE("grid interpolation is exact on affine functions") {
  const GridSpec g(p2(-1, -1), 0.1, {21, 21});
  auto lin = [](const Point& x) { return 0.3 - 1.7 * x[0] + 0.4 * x[1]; };
  const GridField f = GridField::sample(g, lin);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const Point x = p2(u(rng), u(rng));
    CHECK(f(x) == doctest::Approx(lin(x)).epsilon(1e-12));
  }
  CHECK(f.lipschitz() == doctest::Approx(1.7));
  CHECK_THROWS_AS(f(p2(1.2, 0)), InvalidArgument);
  CHECK(std::isnan(forward_slope(f, {20, 0, 0}, {1, 0, 0})));
  CHECK(forward_slope(f, {3, 4, 0}, {1, 1, 0}) == doctest::Approx((-1.7 + 0.4) / std::sqrt(2.0)));
}

TEST_CASE("grid add, crop and box average") {
  const GridSpec g(p2(0, 0), 0.5, {8, 6});
  GridField f(g, 1.0);
  const GridSpec w = g.sub({2, 1, 0}, {4, 3, 0});
  GridField b(w, 2.0);
  f.add(b, -0.5);
  CHECK(f.at({3, 2, 0}) == 0.0);
  CHECK(f.at({5, 2, 0}) == 1.0);
  const GridField c = f.crop(w);
  for (double v : c.values()) CHECK(v == 0.0);
  const std::vector<double> avg = box_average(g, std::vector<double>(g.size(), 3.0), 2);
  for (double v : avg) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("lattice steps and cone stencil") {
  const Index3 p = lattice_step(p2(1, 1).normalized());
  CHECK(p == Index3{1, 1, 0});
  CHECK_THROWS_AS(lattice_step(p2(2, 1).normalized()), InvalidArgument);
  const auto st = cone_stencil(2, {0, 1, 0});
  CHECK(st.front() == Index3{0, 1, 0});
  CHECK(st.size() == 3);
}

TEST_CASE("perturbation_g with empty K is zero") {
  const GridSpec g = GridSpec::covering(p2(0, 0), p2(1, 1), 1.0 / 32);
  const PerturbationResult r = perturbation_g({}, ConeSpec(Point::Unit(2, 1), std::numbers::pi / 6), 0.05, g);
  CHECK(r.g.sup_norm() == 0.0);
}

TEST_CASE("perturbation_g at a single point") {
  const double h = 1.0 / 256, eps = 0.05;
  const GridSpec g = GridSpec::covering(p2(0.5, 0.5), p2(0.5, 0.5), h, 0.2);
  const std::vector<Point> k{p2(0.5, 0.5)};
  const PerturbationResult r = perturbation_g(k, ConeSpec(Point::Unit(2, 1), std::numbers::pi / 6), eps, g);
  double lo = 0.0;
  for (double v : r.g.values()) lo = std::min(lo, v);
  CHECK(lo >= 0.0);
  CHECK(r.g.sup_norm() <= eps + h);
  const SlopeReport s = slope_report(r.g, r.step, k);
  CHECK(s.k_edges > 0);
  CHECK(s.min_e_on_k == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.min_e >= -1e-9);
  CHECK(s.max_e <= 1.0 + 1e-9);
}

TEST_CASE("perturbation_g on the middle-thirds Cantor set") {
  const double h = 1.0 / 512, eps = 0.05, alpha = std::numbers::pi / 6;
  const std::vector<Point> k = cantor_on_line(5, 0.5);
  const GridSpec g = GridSpec::covering(p2(0, 0.5), p2(1, 0.5), h, 0.1);
  const PerturbationResult r = perturbation_g(k, ConeSpec(Point::Unit(2, 1), alpha), eps, g);
  const SlopeReport s = slope_report(r.g, r.step, k);
  CHECK(s.sup <= eps + h);
  CHECK(s.min_e >= -1e-6);
  CHECK(s.max_e <= 1.0 + 1e-6);
  CHECK(s.min_e_on_k >= 1.0 - 1e-6);
  CHECK(s.max_transverse <= 1.0 / std::tan(alpha) + 3.0 * h);
}

TEST_CASE("perturbation_g rejects a set that is not cone-null") {
  const double h = 1.0 / 128;
  std::vector<Point> k;
  for (int i = 0; i <= 64; ++i) k.push_back(p2(0.5, 0.25 + i / 128.0));
  const GridSpec g = GridSpec::covering(p2(0.5, 0.25), p2(0.5, 0.75), h, 0.1);
  try {
    perturbation_g(k, ConeSpec(Point::Unit(2, 1), std::numbers::pi / 6), 0.05, g);
    FAIL("expected NotConeNull");
  } catch (const NotConeNull& e) {
    CHECK(e.witness().vertices.size() >= 2);
  }
}

TEST_CASE("localized bump support and slopes") {
  const double h = 1.0 / 1024, eps = 0.05;
  const double rr = 0.1, rp = 0.45;
  const std::vector<Point> k = cantor_on_line(3, 0.5);
  const GridSpec g = GridSpec::covering(p2(0, 0.5), p2(1, 0.5), h, 0.2);
  // sup g·max|dφ| ≤ eps with the smoothstep slope bound 1.5/(r' − r).
  const double eps0 = eps * (rp - rr) / 1.5;
  const PerturbationResult r = perturbation_g(k, ConeSpec(Point::Unit(2, 1), std::numbers::pi / 6), eps0, g);
  const Point c = p2(0.5, 0.5);
  const GridField b = localized_bump(r.g, c, rr, rp, eps0 + h);
  for (std::size_t i = 0; i < b.size(); ++i)
    if ((b.spec().node(i) - c).norm() >= rp) CHECK(b[i] == 0.0);
  std::vector<Point> inner;
  for (const Point& x : k)
    if ((x - c).norm() < rr - 2.0 * h) inner.push_back(x);
  const SlopeReport s = slope_report(b, r.step, inner);
  CHECK(s.min_e_on_k >= 1.0 - 1e-6);
  CHECK(s.min_e >= -eps - 1e-9);
  CHECK(s.max_transverse <= 2.0 / std::tan(std::numbers::pi / 6) + 3.0 * h);

  const GridField zero = localized_bump(GridField(g, 0.0), c, rr, rp, eps);
  CHECK(zero.sup_norm() == 0.0);
  CHECK_THROWS_AS(localized_bump(r.g, c, rp, rr, eps), InvalidArgument);
}

TEST_CASE("regularize_keep on a paraboloid") {
  const GridSpec g(p2(-1, -1), 1.0 / 64, {129, 129});
  const GridField f = GridField::sample(g, [](const Point& x) { return x.squaredNorm(); });
  const std::vector<Point> k{p2(0, 0), p2(0.5, -0.25)};
  auto phi = [](double t) { return t; };
  const RegularizeResult r = regularize_keep(f, k, phi, 0.1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (r.keep[i]) CHECK(r.g[i] == f[i]);
    CHECK(std::abs(r.g[i] - f[i]) <= phi(brute_distance(g.node(i), k)) + 1e-12);
  }
  CHECK(r.lip_out <= r.lip_in + 0.1 + 2.0 * g.spacing);
}

TEST_CASE("regularize_keep with K equal to the grid") {
  const GridSpec g(p2(0, 0), 0.25, {5, 5});
  const GridField f = GridField::sample(g, [](const Point& x) { return std::sin(3 * x[0]) + x[1]; });
  std::vector<Point> k;
  for (std::size_t i = 0; i < g.size(); ++i) k.push_back(g.node(i));
  const RegularizeResult r = regularize_keep(f, k, [](double t) { return t; }, 0.1);
  CHECK(r.g.values() == f.values());
}

TEST_CASE("regularize_keep on a distance function with quadratic phi") {
  const GridSpec g(p2(0, 0), 1.0 / 64, {65, 65});
  const std::vector<Point> k{p2(0.25, 0.25), p2(0.75, 0.6)};
  const GridField f = GridField::sample(g, [&](const Point& x) { return brute_distance(x, k); });
  const RegularizeResult r = regularize_keep(f, k, [](double t) { return t * t; }, 0.05);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = brute_distance(g.node(i), k);
    if (r.keep[i]) CHECK(r.g[i] == f[i]);
    CHECK(std::abs(r.g[i] - f[i]) <= d * d + 1e-12);
  }
  CHECK_THROWS_AS(regularize_keep(f, {}, [](double t) { return t; }, 0.1), InvalidArgument);
  CHECK_THROWS_AS(regularize_keep(f, k, [](double) { return -1.0; }, 0.1), InvalidArgument);
}

TEST_CASE("anisotropic smoothing keeps affine functions") {
  const double h = 1.0 / 32;
  const GridSpec g(p2(0, 0), h, {33, 33});
  auto lin = [](const Point& x) { return 0.5 + 2.0 * x[0] - x[1]; };
  const GridField f = GridField::sample(g, lin);
  const AnisotropicResult r = anisotropic_smooth(f, x_axis(), 0.2, 4 * h);
  CHECK(r.r_perp == doctest::Approx(0.2 * 4 * h / r.lip));
  const double pad = r.r_par + r.r_perp + h;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.node(i);
    if (x.minCoeff() < pad || x.maxCoeff() > 1 - pad) continue;
    CHECK(r.f[i] == doctest::Approx(lin(x)).epsilon(1e-12));
  }
  const AnisotropicResult r2 = anisotropic_smooth(f, x_axis(), 0.4, 4 * h);
  CHECK(r2.r_perp == doctest::Approx(2.0 * r.r_perp));
  CHECK_THROWS_AS(anisotropic_smooth(f, Subspace::zero(2), 0.2, 4 * h), InvalidArgument);
  CHECK_THROWS_AS(anisotropic_smooth(f, x_axis(), 0.2, h), ResolutionError);
}

TEST_CASE("anisotropic smoothing of |x2| along the x-axis") {
  const double h = 1.0 / 64, eps = 0.1;
  const GridSpec g(p2(-0.5, -0.5), h, {65, 65});
  const GridField f = GridField::sample(g, [](const Point& x) { return std::abs(x[1]); });
  const AnisotropicResult r = anisotropic_smooth(f, x_axis(), eps, 4 * h);
  CHECK(r.m == doctest::Approx(smoothing_constant(2)));
  for (int j = 0; j < 65; ++j)
    for (int i = 16; i < 48; ++i) {
      const double dv = (r.f.at({i + 1, j, 0}) - r.f.at({i - 1, j, 0})) / (2 * h);
      CHECK(std::abs(dv) <= r.m * eps);
    }
}

TEST_CASE("smoothing constant against unit-ball volumes") {
  // c0 = 1, c1 = 2, c2 = π, c3 = 4π/3.
  CHECK(smoothing_constant(2) == doctest::Approx(std::max(18.0 / 2.0, 18.0 * 2.0 / std::numbers::pi)));
  CHECK(smoothing_constant(3) == doctest::Approx(18.0 * std::numbers::pi / (4.0 * std::numbers::pi / 3.0)));
}

TEST_CASE("difference quotients of a linear function") {
  const GridSpec g(p2(0, 0), 1.0 / 128, {129, 129});
  const GridField f = GridField::sample(g, [](const Point& x) { return 3 * x[0] - 2 * x[1]; });
  const Point v = p2(0.6, 0.8);
  const auto ladder = dyadic_ladder(0.25, 2 * g.spacing);
  const QuotientRow row = difference_quotients(f, p2(0.3, 0.1), v, 0.25, ladder);
  CHECK(row.u == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(row.d_plus == doctest::Approx(3 * 0.6 - 2 * 0.8));
  CHECK(row.d_minus == doctest::Approx(3 * 0.6 - 2 * 0.8));
  CHECK_THROWS_AS(difference_quotients(f, p2(0.9, 0.9), v, 0.25, ladder), InvalidArgument);
  CHECK_THROWS_AS(difference_quotients(f, p2(0.1, 0.1), v, 0.25, dyadic_ladder(0.25, 0.5 * g.spacing)),
                  InvalidArgument);
  CHECK_THROWS_AS(difference_quotients(f, p2(0.1, 0.1), v, 0.25, {0.25, 0.1}), InvalidArgument);
}

TEST_CASE("difference quotients of x sin(ln x) at the origin") {
  auto fn = [](const Point& x) { return x[0] > 0 ? x[0] * std::sin(std::log(x[0])) : 0.0; };
  const auto ladder = dyadic_ladder(1.0, std::ldexp(1.0, -80));
  const QuotientRow row = difference_quotients(ScalarFn(fn), p2(0, 0), p2(1, 0), 1.0, ladder);
  double hi = -2, lo = 2;
  for (int j = 0; j <= 80; ++j) {
    const double q = std::sin(-j * std::numbers::ln2);
    hi = std::max(hi, q);
    lo = std::min(lo, q);
  }
  CHECK(row.t_plus == doctest::Approx(hi).epsilon(1e-9));
  CHECK(row.t_minus == doctest::Approx(lo).epsilon(1e-9));
  CHECK(row.u > 1.95);
  for (std::size_t j = 1; j < row.u_by_sigma.size(); ++j) CHECK(row.u_by_sigma[j] <= row.u_by_sigma[j - 1]);
}

TEST_CASE("one-sided quotients of |x1| at the kink") {
  auto fn = [](const Point& x) { return std::abs(x[0]); };
  const QuotientRow row = difference_quotients(ScalarFn(fn), p2(0, 0), p2(1, 0), 0.5, dyadic_ladder(0.5, 1e-6));
  CHECK(row.u == 0.0);
  CHECK(row.t_plus == 1.0);
}

TEST_CASE("deviation from linearity") {
  const Point alpha = p2(1.5, -0.5);
  ScalarFn lin = [&](const Point& x) { return alpha.dot(x); };
  CHECK(deviation_from_linearity(lin, p2(0.2, 0.3), Subspace::whole(2), alpha, 0.1) == doctest::Approx(0.0));
  ScalarFn kink = [](const Point& x) { return std::abs(x[1]); };
  CHECK(deviation_from_linearity(kink, p2(0, 0), x_axis(), p2(0, 0), 0.5) == 0.0);
  const Subspace diag = Subspace::from_columns(Eigen::MatrixXd(p2(1, 1)));
  CHECK(deviation_from_linearity(kink, p2(0, 0), diag, p2(0, 0), 0.5) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("deviation comparison bound on random instances") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 50; ++t) {
    const Point a = p2(gauss(rng), gauss(rng)), b = p2(gauss(rng), gauss(rng));
    const double lip = a.norm() + b.norm();
    ScalarFn f = [&](const Point& x) { return std::abs(a.dot(x)) - std::abs(b.dot(x)); };
    const Subspace w = Subspace::from_columns(Eigen::MatrixXd(p2(gauss(rng), gauss(rng))));
    const Subspace w2 = Subspace::from_columns(Eigen::MatrixXd(p2(gauss(rng), gauss(rng))));
    const Point al = p2(gauss(rng), gauss(rng)), al2 = p2(gauss(rng), gauss(rng));
    const Point x = p2(gauss(rng), gauss(rng));
    const std::vector<Point> inc = deviation_increments(w, 0.5);
    // The W′ sample set also holds the projections of the W samples.
    std::vector<Point> inc2 = deviation_increments(w2, 0.5);
    for (const Point& h : inc) inc2.push_back(w2.project(h));
    const double m = deviation_from_linearity(f, x, inc, al);
    const double m2 = deviation_from_linearity(f, x, inc2, al2);
    CHECK(m <= m2 + (al2 - al).norm() + (lip + al2.norm()) * d_gr(w, w2) + 1e-9);
  }
}

TEST_CASE("check_nondiff negative control") {
  const GridSpec g(p2(0, 0), 1.0 / 64, {65, 65});
  const GridField f(g, 0.0);
  AtomicMeasure mu(2);
  mu.add(p2(0.25, 0.25), 1.0);
  mu.add(p2(0.5, 0.5), 2.0);
  const Bundle b(mu.size(), x_axis());
  const NondiffCheck c = check_nondiff(f, mu, b, {Point::Unit(2, 0), Point::Unit(2, 1)}, {16.0 / 64});
  CHECK(c.pass_fraction == 0.0);
  CHECK(c.direction_fraction[0] == 1.0);
  CHECK(c.direction_fraction[1] == 0.0);
  CHECK(c.rows[1].rhs == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(check_nondiff(f, mu, b, {}, {0.25}), InvalidArgument);
}

TEST_CASE("assemble_nondiff on Cantor dust") {
  const AtomicMeasure mu = cantor_dust(4);
  const Bundle b(mu.size(), Subspace::zero(2));
  NondiffParams p;
  p.directions = {Point::Unit(2, 0), Point::Unit(2, 1), p2(1, 1).normalized()};
  const NondiffResult r = assemble_nondiff(mu, b, 3, p);
  CHECK(r.lipschitz <= 4.0 + 1e-3);
  for (const RoundLog& log : r.rounds) {
    CHECK(log.bound == doctest::Approx(log.target_mass / 8.0));
    CHECK(log.covered_mass >= log.bound);
  }
  const NondiffCheck c = check_nondiff(r.f, mu, b, r.directions, r.sigmas, 0.02);
  CHECK(c.pass_fraction >= 0.75);
  CHECK(c.rows[0].rhs == doctest::Approx(1.0 / (3.0 * std::sqrt(2.0))));
}

TEST_CASE("assemble_nondiff on a horizontal segment") {
  const double h = 1.0 / 1024;
  const AtomicMeasure mu = h1_measure(segment_curve(p2(0.1, 0.5), p2(0.9, 0.5)), h);
  const Bundle b(mu.size(), x_axis());
  NondiffParams p;
  p.spacing = h;
  p.r0 = 0.1;
  p.directions = {Point::Unit(2, 0), Point::Unit(2, 1)};
  const NondiffResult r = assemble_nondiff(mu, b, 3, p);
  for (const RoundLog& log : r.rounds)
    if (!log.balls.empty()) CHECK((log.e - Point::Unit(2, 1)).norm() == 0.0);
  const NondiffCheck c = check_nondiff(r.f, mu, b, r.directions, r.sigmas, 0.02);
  CHECK(c.direction_fraction[1] >= 0.75);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) flat += c.rows[2 * i].u <= 0.05;
  CHECK(static_cast<double>(flat) >= 0.9 * static_cast<double>(mu.size()));
}

TEST_CASE("assemble_nondiff on a full-dimensional measure is zero") {
  const AtomicMeasure mu = grid_lebesgue(2, 16);
  const Bundle b(mu.size(), Subspace::whole(2));
  const NondiffResult r = assemble_nondiff(mu, b, 2);
  CHECK(r.f.sup_norm() == 0.0);
  for (const RoundLog& log : r.rounds) CHECK(log.balls.empty());
}

TEST_CASE("assemble_nondiff patch limit") {
  AtomicMeasure mu(2);
  Bundle b;
  for (int i = 0; i < 4; ++i) {
    mu.add(p2(0.25 * i, 0.0), 1.0);
    const double t = 0.4 * i;
    b.push_back(Subspace::from_columns(Eigen::MatrixXd(p2(std::cos(t), std::sin(t)))));
  }
  NondiffParams p;
  p.max_patches = 2;
  CHECK_THROWS_AS(assemble_nondiff(mu, b, 1, p), ResolutionError);
}
