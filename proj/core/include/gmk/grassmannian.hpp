#pragma once

#include <vector>

#include <Eigen/Core>

namespace gmk {

class AtomicMeasure;

inline constexpr double kRankTol = 1e-9;

// Linear subspace of R^n kept as an orthonormal frame (one column per basis vector).
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(int n);

  static Subspace zero(int n) { return Subspace(n); }
  static Subspace whole(int n);
  // Columns are re-orthonormalized; rank decided with the relative tolerance.
  static Subspace from_columns(const Eigen::MatrixXd& cols, double rel_tol = kRankTol);

  int n() const { return n_; }
  int dim() const { return static_cast<int>(frame_.cols()); }
  const Eigen::MatrixXd& frame() const { return frame_; }

  Eigen::MatrixXd projector() const;
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

 private:
  int n_ = 0;
  Eigen::MatrixXd frame_;
};

Subspace from_vectors(int n, const std::vector<Eigen::VectorXd>& vs, double rel_tol = kRankTol);

// δ(V,W): operator norm of (I - P_W) P_V.
double excess(const Subspace& v, const Subspace& w);
double d_gr(const Subspace& v, const Subspace& w);

Subspace intersect(const Subspace& v, const Subspace& w, double tol = kRankTol);
Subspace complement(const Subspace& v);
Subspace sum(const Subspace& v, const Subspace& w, double rel_tol = kRankTol);
double dist(const Eigen::VectorXd& x, const Subspace& v);

// Largest principal angle between subspaces of equal dimension.
double max_principal_angle(const Subspace& v, const Subspace& w);

// Per-atom subspace assignment, indexed like the companion measure's atoms.
using Bundle = std::vector<Subspace>;

struct MinimalElement {
  Bundle bundle;
  double phi = 0.0;
};

double phi(const Bundle& b, const AtomicMeasure& mu);
MinimalElement minimal_element(const std::vector<Bundle>& family, const AtomicMeasure& mu);

// fields[f][i] is the vector of field f at atom i.
Bundle essential_span(const std::vector<std::vector<Eigen::VectorXd>>& fields,
                      const AtomicMeasure& mu);

}  // namespace gmk
