#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "gmk/errors.hpp"
#include "gmk/generators.hpp"
#include "gmk/io.hpp"

using namespace gmk;

namespace {

Point p2(double a, double b) { return Eigen::Vector2d(a, b); }

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("measure json round trip") {
  const AtomicMeasure mu = cantor_dust(2);
  const AtomicMeasure back = measure_from_json(Json::parse(dump(to_json(mu))));
  REQUIRE(back.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(back[i].x == mu[i].x);
    CHECK(back[i].w == mu[i].w);
  }
  CHECK(dump(to_json(back)) == dump(to_json(mu)));
}

TEST_CASE("measure parse errors") {
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"atoms": []})")), ParseError);
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"n": 2, "atoms": [{"x": [0], "w": 1}]})")), ParseError);
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"n": 2, "atoms": [{"x": [0, 1], "w": "a"}]})")), ParseError);
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"n": 2, "atoms": [{"x": [0, 1], "w": -1}]})")), ParseError);
  const std::string bad = temp_path("gmk_bad.json");
  write_text(bad, "{\"n\": 2,");
  CHECK_THROWS_AS(read_json(bad), ParseError);
  CHECK_THROWS_AS(read_json(temp_path("gmk_missing_file.json")), ParseError);
  std::remove(bad.c_str());
}

TEST_CASE("family and current round trips") {
  CurveFamily fam{2, {{0.5, {{p2(0, 0), p2(1, 0), p2(1, 1)}, 2.0}}}};
  const CurveFamily f2 = family_from_json(to_json(fam));
  REQUIRE(f2.members.size() == 1);
  CHECK(f2.members[0].dt == 0.5);
  CHECK(f2.members[0].curve.mult == 2.0);
  CHECK(f2.members[0].curve.vertices.size() == 3);

  PolylineCurrent1 t{2, {{1.5, {p2(0, 0), p2(0, 1)}}}};
  const Json jt = to_json(t);
  CHECK(current_degree(jt) == 1);
  CHECK(current1_from_json(jt).pieces[0].m == 1.5);
  CHECK_THROWS_AS(current2_from_json(jt), ParseError);

  TriangleMeshCurrent2 m{2, {{1.0, {p2(0, 0), p2(1, 0), p2(0, 1)}}}};
  const TriangleMeshCurrent2 m2 = current2_from_json(to_json(m));
  CHECK(m2.triangles[0].v[2] == p2(0, 1));
  CHECK_THROWS_AS(current2_from_json(Json::parse(R"({"n": 2, "k": 2, "pieces": [{"vertices": [[0,0],[1,0]]}]})")),
                  ParseError);
}

TEST_CASE("bundle round trip") {
  Bundle b{Subspace::zero(2), Subspace::whole(2), Subspace::from_columns(Eigen::MatrixXd(p2(1, 1)))};
  const Bundle back = bundle_from_json(to_json(b), 2);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].dim() == b[i].dim());
    CHECK(d_gr(back[i], b[i]) < 1e-12);
  }
}

TEST_CASE("grid json and binary round trips") {
  const GridSpec g(p2(-0.5, 0.25), 0.125, {5, 3});
  const GridField f = GridField::sample(g, [](const Point& x) { return x[0] * x[0] - x[1]; });
  const GridField j = grid_from_json(Json::parse(dump(to_json(f))));
  CHECK(j.values() == f.values());
  const std::string path = temp_path("gmk_grid.bin");
  write_grid_binary(path, f);
  const GridField b = read_grid_binary(path);
  CHECK(b.values() == f.values());
  CHECK(b.spec().shape == f.spec().shape);
  write_text(path, "GMKF");
  CHECK_THROWS_AS(read_grid_binary(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("quotient csv layout") {
  QuotientRow r;
  r.atom = 3;
  r.v = p2(1, 0);
  r.sigma = 0.25;
  r.u = 0.5;
  r.rhs = 1.0 / 3.0;
  r.pass = true;
  const std::string csv = quotient_csv({r});
  CHECK(csv.rfind("atom,v,sigma,Tplus,Tminus,U,Dplus,Dminus,rhs,pass\n", 0) == 0);
  CHECK(csv.find("3,1 0,0.25,0,0,0.5,0,0,0.3333333333333333,1\n") != std::string::npos);
}
