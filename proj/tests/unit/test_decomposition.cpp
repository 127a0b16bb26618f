#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "gmk/decomposition.hpp"
#include "gmk/errors.hpp"
#include "gmk/generators.hpp"

using namespace gmk;

namespace {

Point p2(double a, double b) { return Eigen::Vector2d(a, b); }

// Longest weighted cone chain by exhaustive path search.
double brute_chain(const std::vector<Point>& pts, const std::vector<double>& w, const ConeSpec& c, double lo,
                   double hi) {
  std::function<double(std::size_t)> best_from = [&](std::size_t i) {
    double b = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const Point d = pts[j] - pts[i];
      const double len = d.norm();
      if (j == i || len < lo || len > hi) continue;
      if (d.dot(c.e) >= std::cos(c.alpha) * len) b = std::max(b, best_from(j));
    }
    return w[i] + b;
  };
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) best = std::max(best, best_from(i));
  return best;
}

PolylineCurrent1 random_graph_current(std::mt19937_64& rng, bool balanced) {
  PolylineCurrent1 t{2, {}};
  std::uniform_int_distribution<int> coord(0, 7), mult(1, 4), len(3, 6);
  auto node = [&] { return p2(coord(rng) / 8.0, coord(rng) / 8.0); };
  if (!balanced) {
    const int edges = 20 + static_cast<int>(rng() % 150);
    for (int i = 0; i < edges; ++i) {
      const Point a = node(), b = node();
      if ((a - b).norm() == 0) continue;
      t.pieces.push_back({static_cast<double>(mult(rng)), {a, b}});
    }
    return t;
  }
  const int cycles = 3 + static_cast<int>(rng() % 10);
  for (int c = 0; c < cycles; ++c) {
    std::vector<Point> v;
    const int k = len(rng);
    for (int i = 0; i < k; ++i) v.push_back(node());
    v.push_back(v.front());
    const double m = mult(rng);
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if ((v[i] - v[i + 1]).norm() > 0) t.pieces.push_back({m, {v[i], v[i + 1]}});
  }
  return t;
}

// Net multiplicity per unordered vertex pair, straight from the pieces.
std::map<std::pair<Key, Key>, double> edge_balance(const PolylineCurrent1& t) {
  std::map<std::pair<Key, Key>, double> net;
  for (const Piece1& p : t.pieces)
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
      Key a = quantize(p.vertices[s], kDefaultQuant), b = quantize(p.vertices[s + 1], kDefaultQuant);
      if (a == b) continue;
      if (a < b) net[{a, b}] += p.m;
      else net[{b, a}] -= p.m;
    }
  return net;
}

}  // namespace

TEST_CASE("cone spec") {
  const ConeSpec c(p2(2, 0), M_PI / 6);
  CHECK(c.e.norm() == doctest::Approx(1.0));
  CHECK(c.contains(p2(1, 0.5)));
  CHECK_FALSE(c.contains(p2(1, 0.6)));
  CHECK_THROWS_AS(ConeSpec(p2(1, 0), 2.0), InvalidArgument);
  CHECK(cones_cover(default_cone_net(2), 2));
  CHECK(cones_cover(default_cone_net(3), 3));
  CHECK_FALSE(cones_cover({ConeSpec(p2(1, 0), 1.0)}, 2));
}

TEST_CASE("smirnov examples") {
  const PolylineCurrent1 loop = current_from_curve(circle_curve(12));
  Decomposition d = smirnov_decompose(loop);
  REQUIRE(d.pieces.size() == 1);
  CHECK(d.pieces[0].loop);
  CHECK(d.pieces[0].weight == 1.0);
  CHECK(d.pieces[0].curve.vertices.size() == 13);

  PolylineCurrent1 eight{2, {{1.0, {p2(0, 0), p2(1, 1), p2(1, -1), p2(0, 0), p2(-1, 1), p2(-1, -1), p2(0, 0)}}}};
  d = smirnov_decompose(eight);
  CHECK(d.pieces.size() == 2);
  for (const auto& p : d.pieces) CHECK(p.loop);
  CHECK(std::abs(mass_residual(d, eight)) <= 1e-12);

  d = smirnov_decompose(PolylineCurrent1{2, {{2.0, {p2(0, 0), p2(1, 0)}}}});
  REQUIRE(d.pieces.size() == 1);
  CHECK(d.pieces[0].weight == 2.0);
  CHECK_FALSE(d.pieces[0].loop);

  d = smirnov_decompose(current_from_curve(circle_curve(360)));
  CHECK(d.pieces.size() == 1);
}

TEST_CASE("smirnov random graphs") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const PolylineCurrent1 t = random_graph_current(rng, trial % 2 == 0);
    const Decomposition d = smirnov_decompose(t);
    CHECK(reconstruction_error(d) == 0.0);

    // Rebuild per-pair balance from the pieces and compare with the input.
    PolylineCurrent1 rebuilt{2, {}};
    for (const auto& p : d.pieces) rebuilt.pieces.push_back({p.weight, p.curve.vertices});
    const auto want = edge_balance(t), got = edge_balance(rebuilt);
    for (const auto& [k, m] : want) {
      auto it = got.find(k);
      CHECK(std::abs((it == got.end() ? 0.0 : it->second) - m) == 0.0);
    }
    PolylineCurrent1 uniq{2, {}};
    for (const auto& e : d.graph.edges) uniq.pieces.push_back({e.m, {d.graph.nodes[e.from], d.graph.nodes[e.to]}});
    CHECK(std::abs(mass_residual(d, uniq)) <= 1e-12);

    ZeroCurrent paths_bdry(2);
    for (const auto& p : d.pieces) {
      std::set<std::size_t> nodes;
      if (p.loop) {
        CHECK(p.curve.vertices.front() == p.curve.vertices.back());
      } else {
        paths_bdry.add(p.curve.vertices.back(), p.weight);
        paths_bdry.add(p.curve.vertices.front(), -p.weight);
      }
      for (std::size_t i = 0; i + (p.loop ? 1 : 0) < p.curve.vertices.size(); ++i)
        CHECK(nodes.insert(std::hash<std::string>{}(std::to_string(p.curve.vertices[i][0]) + "," +
                                                   std::to_string(p.curve.vertices[i][1])))
                  .second);
    }
    const ZeroCurrent tb = boundary(uniq);
    for (const Atom& a : tb.atoms()) paths_bdry.add(a.x, -a.w);
    paths_bdry.prune();
    CHECK(paths_bdry.total_variation() <= 1e-12);
    if (trial % 2 == 0) CHECK(tb.total_variation() == 0.0);
  }
}

TEST_CASE("bundle_from_family") {
  CurveFamily horiz{2, {}}, vert{2, {}};
  for (int j = 0; j < 8; ++j) {
    horiz.members.push_back({1.0 / 8, segment_curve(p2(0, (j + 0.5) / 8), p2(1, (j + 0.5) / 8))});
    vert.members.push_back({1.0 / 8, segment_curve(p2((j + 0.5) / 8, 0), p2((j + 0.5) / 8, 1))});
  }
  const AtomicMeasure grid = grid_lebesgue(2, 8);
  Bundle b = bundle_from_family(horiz, grid);
  for (const Subspace& s : b) CHECK(d_gr(s, from_vectors(2, {p2(1, 0)})) <= 1e-12);
  CurveFamily both = horiz;
  both.members.insert(both.members.end(), vert.members.begin(), vert.members.end());
  b = bundle_from_family(both, grid);
  for (const Subspace& s : b) CHECK(s.dim() == 2);

  CurveFamily circ{2, {{1.0, circle_curve(360)}}};
  const AtomicMeasure cm = h1_measure(circle_curve(360), 0.01);
  b = bundle_from_family(circ, cm);
  for (std::size_t i = 0; i < cm.size(); ++i) {
    const Point t = p2(-cm[i].x[1], cm[i].x[0]).normalized();
    CHECK(max_principal_angle(b[i], from_vectors(2, {t})) <= 1e-2);
  }
  const AtomicMeasure far = grid_lebesgue(2, 4);
  CHECK(bundle_from_family(CurveFamily{2, {{1.0, segment_curve(p2(5, 5), p2(6, 5))}}}, far)[0].dim() == 0);
}

TEST_CASE("cone_curve_extract") {
  AtomicMeasure line(2);
  for (int i = 0; i < 10; ++i) line.add(p2(0.1 * i, 0.05 * i), 0.1);
  const ConeSpec along(p2(2, 1), M_PI / 6);
  ConeCurve c = cone_curve_extract(line, along, 1e-6, 0.5);
  CHECK(c.captured_mass == doctest::Approx(1.0));

  AtomicMeasure ortho(2);
  for (int i = 0; i < 10; ++i) ortho.add(p2(0, 0.1 * i), 0.1);
  c = cone_curve_extract(ortho, ConeSpec(p2(1, 0), M_PI / 6), 1e-6, 1.0);
  CHECK(c.captured_mass == doctest::Approx(0.1));
  CHECK(c.atoms.size() == 1);

  CHECK(cone_curve_extract(AtomicMeasure(2), along, 0.1, 1).captured_mass == 0.0);
  CHECK_THROWS_AS(cone_curve_extract(line, along, 0.5, 0.1), InvalidArgument);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    AtomicMeasure mu(2);
    std::vector<Point> pts;
    std::vector<double> w;
    for (int i = 0; i < 9; ++i) {
      const Point x = p2(u(rng), u(rng));
      const double wi = 0.1 + u(rng);
      mu.add(x, wi);
      pts.push_back(x);
      w.push_back(wi);
    }
    const ConeSpec cone(p2(std::cos(trial), std::sin(trial)), 0.3 + 0.02 * trial);
    const ConeCurve got = cone_curve_extract(mu, cone, 0.05, 0.6);
    CHECK(got.captured_mass == doctest::Approx(brute_chain(pts, w, cone, 0.05, 0.6)).epsilon(1e-12));
    const auto& v = got.curve.vertices;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) CHECK(cone.contains(v[i + 1] - v[i]));
  }

  double last = 2.0;
  for (int d = 3; d <= 5; ++d) {
    const AtomicMeasure dust = cantor_dust(d);
    const ConeCurve cd = cone_curve_extract(dust, ConeSpec(p2(1, 1), M_PI / 6), 1e-7, 2.0);
    CHECK(cd.captured_mass < last);
    last = cd.captured_mass;
  }
}

TEST_CASE("unrectifiability certificate") {
  const auto net = default_cone_net(2);
  const CertificateReport seg = unrectifiability_certificate(
      h1_measure(segment_curve(p2(0, 0), p2(1, 0)), 0.01), net, 0.2);
  CHECK_FALSE(seg.certified);
  CHECK(seg.fractions[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(unrectifiability_certificate(cantor_dust(5), net, 0.2).certified);
  const CertificateReport leb = unrectifiability_certificate(grid_lebesgue(2, 32), net, 0.2);
  CHECK_FALSE(leb.certified);
  CHECK(leb.witness.members.size() == net.size());
  CHECK_THROWS_AS(unrectifiability_certificate(cantor_dust(2), {net[0]}, 0.2), InvalidArgument);
}

TEST_CASE("decomposability bundle") {
  std::vector<ConeSpec> axis;
  for (const Point& v : {p2(1, 0), p2(0, 1), p2(-1, 0), p2(0, -1)}) axis.emplace_back(v, M_PI / 6);
  const AtomicMeasure leb = grid_lebesgue(2, 32);
  BundleReport r = decomposability_bundle(leb, {}, {}, axis);
  CHECK(r.dim_mass[2] >= 0.99 * leb.total_mass());
  for (std::size_t i = 1; i < r.f_history.size(); ++i) CHECK(r.f_history[i].second >= r.f_history[i - 1].second);

  r = decomposability_bundle(cantor_dust(4), {}, {}, default_cone_net(2));
  CHECK(r.dim_count[0] == 256);

  const Point v = p2(3, 1).normalized();
  const AtomicMeasure seg = h1_measure(segment_curve(p2(0, 0), v), 0.02);
  r = decomposability_bundle(seg, {}, {}, default_cone_net(2));
  for (const Subspace& s : r.bundle) CHECK(max_principal_angle(s, from_vectors(2, {v})) <= 1e-9);

  // A current alone already fixes the bundle on its support.
  const AtomicMeasure cm = h1_measure(circle_curve(90), 0.05);
  r = decomposability_bundle(cm, {}, {current_from_curve(circle_curve(90))}, {});
  CHECK(r.dim_count[1] == static_cast<int>(cm.size()));

  // Locality: restricting μ leaves the bundle unchanged at shared atoms.
  const AtomicMeasure half = restrict(leb, [](const Point& x) { return x[0] < 0.5; });
  const BundleReport rh = decomposability_bundle(half, {}, {}, axis);
  const BundleReport rf = decomposability_bundle(leb, {}, {}, axis);
  for (std::size_t i = 0; i < half.size(); ++i) CHECK(rh.bundle[i].dim() == rf.bundle[*leb.find(half[i].x)].dim());

  CurveFamily plane_x{3, {}}, plane_y{3, {}};
  for (int j = 0; j < 8; ++j) {
    const double c = (j + 0.5) / 8;
    plane_x.members.push_back({1.0, segment_curve(Eigen::Vector3d(0, c, 0.5), Eigen::Vector3d(1, c, 0.5))});
    plane_y.members.push_back({1.0, segment_curve(Eigen::Vector3d(c, 0, 0.5), Eigen::Vector3d(c, 1, 0.5))});
  }
  AtomicMeasure sheet(3);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) sheet.add(Eigen::Vector3d((i + 0.5) / 8, (j + 0.5) / 8, 0.5), 1.0 / 64);
  r = decomposability_bundle(sheet, {plane_x, plane_y}, {}, {});
  CHECK(r.dim_count[2] == 64);
}

TEST_CASE("span inclusion") {
  const PolylineCurrent1 circ = current_from_curve(circle_curve(360));
  const AtomicMeasure mu = h1_measure(circle_curve(360), 0.01);
  const Bundle b = bundle_from_family(family_from_decomposition(smirnov_decompose(circ)), mu);
  CHECK(verify_span_inclusion(atomize(circ, 0.01), mu, b, 1e-2) == 1.0);
  CHECK(verify_span_inclusion(VectorAtomMeasure(2, 1), mu, b, 1e-2) == 1.0);
  const Bundle wrong(mu.size(), from_vectors(2, {p2(1, 0)}));
  CHECK(verify_span_inclusion(atomize(circ, 0.01), mu, wrong, 1e-2) < 0.1);
  CHECK_THROWS_AS(verify_span_inclusion(atomize(circ, 0.01), mu, Bundle(3), 1e-2), InvalidArgument);
}
