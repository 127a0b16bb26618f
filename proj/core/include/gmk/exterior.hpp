#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "gmk/grassmannian.hpp"

namespace gmk {

inline constexpr int kMaxDim = 8;

// Strictly increasing index tuple stored as a bitmask: bit i-1 is set when i is present.
using MultiIndex = std::uint32_t;

int binomial(int n, int k);
// I(n,k) in lexicographic order of the increasing tuples.
const std::vector<MultiIndex>& multi_indices(int n, int k);
int multi_index_rank(int n, MultiIndex idx);
MultiIndex make_multi_index(std::initializer_list<int> entries);
MultiIndex make_multi_index(const std::vector<int>& entries);
std::vector<int> entries_of(MultiIndex idx);
// Sign of the permutation that sorts the concatenation (I, J); 0 when they overlap.
int shuffle_sign(MultiIndex i, MultiIndex j);

enum class Variance { vector, covector };

template <Variance V>
class Multi {
 public:
  Multi() = default;
  Multi(int n, int k);

  static Multi basis(int n, MultiIndex idx);
  static Multi scalar(int n, double c);
  static Multi degree_one(const Eigen::VectorXd& x);

  int n() const { return n_; }
  int k() const { return k_; }
  int size() const { return static_cast<int>(c_.size()); }

  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }
  double coeff(MultiIndex idx) const;
  const std::vector<double>& coeffs() const { return c_; }

  double norm() const;
  bool is_zero() const;

  Multi& operator+=(const Multi& o);
  Multi& operator-=(const Multi& o);
  Multi& operator*=(double s);

  friend Multi operator+(Multi a, const Multi& b) { return a += b; }
  friend Multi operator-(Multi a, const Multi& b) { return a -= b; }
  friend Multi operator*(Multi a, double s) { return a *= s; }
  friend Multi operator*(double s, Multi a) { return a *= s; }

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<double> c_;
};

using KVector = Multi<Variance::vector>;
using KCovector = Multi<Variance::covector>;

template <Variance V>
Multi<V> wedge(const Multi<V>& a, const Multi<V>& b);

// v_1 ∧ ... ∧ v_k; the empty list gives the scalar 1.
KVector wedge_all(int n, const std::vector<Eigen::VectorXd>& vs);
KCovector wedge_all_co(int n, const std::vector<Eigen::VectorXd>& vs);

double pair(const KCovector& alpha, const KVector& v);

// Characterized by <v⌐α, β> = <v, α∧β> for every (k-h)-covector β.
KVector interior_product(const KVector& v, const KCovector& alpha);

Subspace span_of(const KVector& v, double rel_tol = kRankTol);
bool is_simple(const KVector& v, double rel_tol = kRankTol);

}  // namespace gmk
