#include <doctest.h>

#include <random>

#include "gmk/exterior.hpp"
#include "gmk/errors.hpp"
#include "oracles.hpp"

using namespace gmk;

namespace {

KVector e(int n, std::initializer_list<int> idx) { return KVector::basis(n, make_multi_index(idx)); }
KCovector es(int n, std::initializer_list<int> idx) { return KCovector::basis(n, make_multi_index(idx)); }

template <Variance V>
Multi<V> random_multi(std::mt19937_64& rng, int n, int k) {
  std::normal_distribution<double> g;
  Multi<V> m(n, k);
  for (int i = 0; i < m.size(); ++i) m[i] = g(rng);
  return m;
}

double max_diff(const KVector& a, const KVector& b) {
  double d = 0.0;
  for (int i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("multi-index tables") {
  CHECK(binomial(6, 3) == 20);
  const auto& idx = multi_indices(5, 2);
  const auto ref = oracle::subsets(5, 2);
  REQUIRE(idx.size() == ref.size());
  for (std::size_t r = 0; r < ref.size(); ++r) {
    std::vector<int> one_based;
    for (int i : ref[r]) one_based.push_back(i + 1);
    CHECK(entries_of(idx[r]) == one_based);
    CHECK(multi_index_rank(5, idx[r]) == static_cast<int>(r));
  }
  CHECK_THROWS_AS(make_multi_index({2, 1}), InvalidArgument);
}

TEST_CASE("wedge basics") {
  CHECK(max_diff(wedge(e(3, {1}), e(3, {2})), e(3, {1, 2})) == 0.0);
  CHECK(wedge(e(3, {1}), e(3, {1})).is_zero());
  CHECK(max_diff(wedge(e(3, {1}) + e(3, {2}), e(3, {2})), e(3, {1, 2})) == 0.0);
  CHECK(max_diff(wedge(e(3, {2}), e(3, {1})), e(3, {1, 2}) * -1.0) == 0.0);
  CHECK_THROWS_AS(wedge(e(2, {1, 2}), e(2, {1})), InvalidArgument);
  CHECK_THROWS_AS(wedge(e(2, {1}), e(3, {1})), InvalidArgument);
}

TEST_CASE("wedge of vectors matches minors") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 6; ++n)
    for (int k = 0; k <= n; ++k) {
      Eigen::MatrixXd cols = oracle::random_matrix(rng, n, k);
      std::vector<Eigen::VectorXd> vs;
      for (int j = 0; j < k; ++j) vs.push_back(cols.col(j));
      const KVector w = wedge_all(n, vs);
      const auto ref = oracle::wedge_minors(cols);
      REQUIRE(static_cast<int>(ref.size()) == w.size());
      for (int i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("wedge associativity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    std::uniform_int_distribution<int> deg(0, n);
    const int a = deg(rng) / 3, b = deg(rng) / 3;
    const int c = std::max(0, std::min(n - a - b, 1));
    auto x = random_multi<Variance::vector>(rng, n, a);
    auto y = random_multi<Variance::vector>(rng, n, b);
    auto z = random_multi<Variance::vector>(rng, n, c);
    CHECK(max_diff(wedge(wedge(x, y), z), wedge(x, wedge(y, z))) <= 1e-12 * (1 + x.norm() * y.norm() * z.norm()));
  }
}

TEST_CASE("pairing") {
  CHECK(pair(es(3, {1, 2}), e(3, {1, 2})) == 1.0);
  CHECK(pair(es(3, {1, 2}), e(3, {1, 3})) == 0.0);
  const KCovector a = wedge(es(3, {1}), es(3, {2}));
  const KVector v = wedge(e(3, {1}) + e(3, {3}), e(3, {2}));
  CHECK(pair(a, v) == 1.0);
  CHECK_THROWS_AS(pair(es(3, {1}), e(3, {1, 2})), InvalidArgument);
}

TEST_CASE("interior product basis action") {
  CHECK(max_diff(interior_product(e(3, {1, 2}), es(3, {1})), e(3, {2})) == 0.0);
  CHECK(max_diff(interior_product(e(3, {1, 2}), es(3, {2})), e(3, {1}) * -1.0) == 0.0);
  CHECK(interior_product(e(3, {1, 2}), es(3, {3})).is_zero());
  CHECK_THROWS_AS(interior_product(e(3, {1}), es(3, {1, 2})), InvalidArgument);

  for (int n = 1; n <= 6; ++n)
    for (int k = 1; k <= n; ++k)
      for (MultiIndex i : multi_indices(n, k))
        for (MultiIndex j : multi_indices(n, k - 1)) {
          const KVector r = interior_product(KVector::basis(n, i), KCovector::basis(n, j));
          KVector expect(n, 1);
          if ((i & j) == j) {
            const MultiIndex rest = i & ~j;
            std::vector<int> seq;
            for (int x : entries_of(j)) seq.push_back(x);
            seq.push_back(entries_of(rest).front());
            expect = KVector::basis(n, rest) * static_cast<double>(oracle::perm_sign(seq));
          }
          CHECK(max_diff(r, expect) == 0.0);
        }
}

TEST_CASE("interior product duality") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 6;
    const int k = 1 + static_cast<int>(rng() % n);
    const int h = static_cast<int>(rng() % (k + 1));
    auto v = random_multi<Variance::vector>(rng, n, k);
    auto al = random_multi<Variance::covector>(rng, n, h);
    auto be = random_multi<Variance::covector>(rng, n, k - h);
    const double lhs = pair(be, interior_product(v, al));
    const double rhs = pair(wedge(al, be), v);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + v.norm() * al.norm() * be.norm()));
  }
  std::mt19937_64 r2(9);
  auto v = random_multi<Variance::vector>(r2, 4, 2);
  CHECK(max_diff(interior_product(v, KCovector::scalar(4, 2.5)), v * 2.5) == 0.0);
}

TEST_CASE("span and simplicity") {
  CHECK(span_of(KVector(3, 2)).dim() == 0);
  const Subspace s = span_of(e(3, {1, 2}));
  CHECK(s.dim() == 2);
  CHECK(excess(s, from_vectors(3, {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)})) <= 1e-12);
  CHECK(span_of(e(4, {1, 2}) + e(4, {3, 4})).dim() == 4);
  CHECK_FALSE(is_simple(e(4, {1, 2}) + e(4, {3, 4})));
  CHECK(is_simple(e(3, {1, 2}) + e(3, {1, 3})));
  CHECK(is_simple(KVector(3, 2)));
}
