#include "gmk/exterior.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "gmk/errors.hpp"

namespace gmk {
namespace {

struct Tables {
  // lists[n][k] holds I(n,k); rank[n][mask] is the position inside its list.
  std::array<std::array<std::vector<MultiIndex>, kMaxDim + 1>, kMaxDim + 1> lists;
  std::array<std::vector<int>, kMaxDim + 1> rank;

  Tables() {
    for (int n = 0; n <= kMaxDim; ++n) {
      rank[n].assign(std::size_t{1} << n, -1);
      for (int k = 0; k <= n; ++k) {
        std::vector<MultiIndex>& out = lists[n][k];
        fill(n, k, 1, 0, out);
        for (std::size_t r = 0; r < out.size(); ++r) rank[n][out[r]] = static_cast<int>(r);
      }
    }
  }

  static void fill(int n, int k, int start, MultiIndex acc, std::vector<MultiIndex>& out) {
    if (k == 0) {
      out.push_back(acc);
      return;
    }
    for (int i = start; i <= n - k + 1; ++i) fill(n, k - 1, i + 1, acc | (1u << (i - 1)), out);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

void check_dim(int n) {
  if (n < 0 || n > kMaxDim)
    throw InvalidArgument("ambient dimension " + std::to_string(n) + " outside [0, 8]");
}

}  // namespace

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

const std::vector<MultiIndex>& multi_indices(int n, int k) {
  check_dim(n);
  if (k < 0 || k > n) throw InvalidArgument("degree outside [0, n]");
  return tables().lists[n][k];
}

int multi_index_rank(int n, MultiIndex idx) {
  check_dim(n);
  if (idx >= (1u << n)) throw InvalidArgument("multi-index entry exceeds n");
  return tables().rank[n][idx];
}

MultiIndex make_multi_index(const std::vector<int>& entries) {
  MultiIndex m = 0;
  int prev = 0;
  for (int e : entries) {
    if (e <= prev || e > kMaxDim) throw InvalidArgument("multi-index must be strictly increasing in [1, 8]");
    m |= 1u << (e - 1);
    prev = e;
  }
  return m;
}

MultiIndex make_multi_index(std::initializer_list<int> entries) {
  return make_multi_index(std::vector<int>(entries));
}

std::vector<int> entries_of(MultiIndex idx) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (idx & (1u << i)) out.push_back(i + 1);
  return out;
}

int shuffle_sign(MultiIndex i, MultiIndex j) {
  if (i & j) return 0;
  // Count pairs (a in I, b in J) with a > b.
  int inversions = 0;
  MultiIndex rest = j;
  while (rest) {
    const int b = std::countr_zero(rest);
    rest &= rest - 1;
    inversions += std::popcount(i >> (b + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

template <Variance V>
Multi<V>::Multi(int n, int k) : n_(n), k_(k) {
  check_dim(n);
  if (k < 0 || k > n) throw InvalidArgument("degree outside [0, n]");
  c_.assign(binomial(n, k), 0.0);
}

template <Variance V>
Multi<V> Multi<V>::basis(int n, MultiIndex idx) {
  Multi m(n, std::popcount(idx));
  m.c_[multi_index_rank(n, idx)] = 1.0;
  return m;
}

template <Variance V>
Multi<V> Multi<V>::scalar(int n, double c) {
  Multi m(n, 0);
  m.c_[0] = c;
  return m;
}

template <Variance V>
Multi<V> Multi<V>::degree_one(const Eigen::VectorXd& x) {
  Multi m(static_cast<int>(x.size()), 1);
  for (int i = 0; i < x.size(); ++i) m.c_[i] = x[i];
  return m;
}

template <Variance V>
double Multi<V>::coeff(MultiIndex idx) const {
  if (std::popcount(idx) != k_) return 0.0;
  return c_[multi_index_rank(n_, idx)];
}

template <Variance V>
double Multi<V>::norm() const {
  double s = 0.0;
  for (double x : c_) s += x * x;
  return std::sqrt(s);
}

template <Variance V>
bool Multi<V>::is_zero() const {
  for (double x : c_)
    if (x != 0.0) return false;
  return true;
}

template <Variance V>
Multi<V>& Multi<V>::operator+=(const Multi& o) {
  if (o.n_ != n_ || o.k_ != k_) throw InvalidArgument("degree or dimension mismatch in sum");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

template <Variance V>
Multi<V>& Multi<V>::operator-=(const Multi& o) {
  if (o.n_ != n_ || o.k_ != k_) throw InvalidArgument("degree or dimension mismatch in difference");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

template <Variance V>
Multi<V>& Multi<V>::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

template <Variance V>
Multi<V> wedge(const Multi<V>& a, const Multi<V>& b) {
  if (a.n() != b.n()) throw InvalidArgument("dimension mismatch in wedge");
  const int n = a.n();
  if (a.k() + b.k() > n) throw InvalidArgument("degree overflow in wedge");
  Multi<V> out(n, a.k() + b.k());
  const auto& ia = multi_indices(n, a.k());
  const auto& ib = multi_indices(n, b.k());
  for (std::size_t p = 0; p < ia.size(); ++p) {
    if (a[p] == 0.0) continue;
    for (std::size_t q = 0; q < ib.size(); ++q) {
      if (b[q] == 0.0) continue;
      const int s = shuffle_sign(ia[p], ib[q]);
      if (s == 0) continue;
      out[multi_index_rank(n, ia[p] | ib[q])] += s * a[p] * b[q];
    }
  }
  return out;
}

template class Multi<Variance::vector>;
template class Multi<Variance::covector>;
template KVector wedge(const KVector&, const KVector&);
template KCovector wedge(const KCovector&, const KCovector&);

KVector wedge_all(int n, const std::vector<Eigen::VectorXd>& vs) {
  KVector acc = KVector::scalar(n, 1.0);
  for (const auto& v : vs) {
    if (v.size() != n) throw InvalidArgument("dimension mismatch in wedge_all");
    acc = wedge(acc, KVector::degree_one(v));
  }
  return acc;
}

KCovector wedge_all_co(int n, const std::vector<Eigen::VectorXd>& vs) {
  KCovector acc = KCovector::scalar(n, 1.0);
  for (const auto& v : vs) {
    if (v.size() != n) throw InvalidArgument("dimension mismatch in wedge_all_co");
    acc = wedge(acc, KCovector::degree_one(v));
  }
  return acc;
}

double pair(const KCovector& alpha, const KVector& v) {
  if (alpha.n() != v.n() || alpha.k() != v.k()) throw InvalidArgument("degree or dimension mismatch in pair");
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += alpha[i] * v[i];
  return s;
}

KVector interior_product(const KVector& v, const KCovector& alpha) {
  if (v.n() != alpha.n()) throw InvalidArgument("dimension mismatch in interior product");
  const int n = v.n();
  const int k = v.k();
  const int h = alpha.k();
  if (h > k) throw InvalidArgument("interior product needs h <= k");
  KVector out(n, k - h);
  const auto& ih = multi_indices(n, h);
  const auto& ir = multi_indices(n, k - h);
  // w_K = sum_H alpha_H * sign(H,K) * v_{H u K}
  for (std::size_t p = 0; p < ih.size(); ++p) {
    if (alpha[p] == 0.0) continue;
    for (std::size_t q = 0; q < ir.size(); ++q) {
      const int s = shuffle_sign(ih[p], ir[q]);
      if (s == 0) continue;
      const double c = v[multi_index_rank(n, ih[p] | ir[q])];
      if (c != 0.0) out[q] += s * alpha[p] * c;
    }
  }
  return out;
}

Subspace span_of(const KVector& v, double rel_tol) {
  const int n = v.n();
  if (v.is_zero() || v.k() == 0) return Subspace(n);
  std::vector<Eigen::VectorXd> gens;
  for (MultiIndex j : multi_indices(n, v.k() - 1)) {
    const KVector w = interior_product(v, KCovector::basis(n, j));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = w[i];
    gens.push_back(x);
  }
  return from_vectors(n, gens, rel_tol);
}

bool is_simple(const KVector& v, double rel_tol) {
  if (v.is_zero()) return true;
  return span_of(v, rel_tol).dim() == v.k();
}

}  // namespace gmk
