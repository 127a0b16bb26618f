#include "gmk/grassmannian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "gmk/errors.hpp"
#include "gmk/measures.hpp"

namespace gmk {

Subspace::Subspace(int n) : n_(n), frame_(n, 0) {}

Subspace Subspace::whole(int n) {
  Subspace s(n);
  s.frame_ = Eigen::MatrixXd::Identity(n, n);
  return s;
}

Subspace Subspace::from_columns(const Eigen::MatrixXd& cols, double rel_tol) {
  const int n = static_cast<int>(cols.rows());
  Subspace s(n);
  if (cols.cols() == 0 || cols.isZero(0.0)) return s;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * sv[0];
  int r = 0;
  while (r < sv.size() && sv[r] > cut) ++r;
  s.frame_ = svd.matrixU().leftCols(r);
  return s;
}

Eigen::MatrixXd Subspace::projector() const { return frame_ * frame_.transpose(); }

Eigen::VectorXd Subspace::project(const Eigen::VectorXd& v) const {
  if (dim() == 0) return Eigen::VectorXd::Zero(n_);
  return frame_ * (frame_.transpose() * v);
}

Subspace from_vectors(int n, const std::vector<Eigen::VectorXd>& vs, double rel_tol) {
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) {
    if (vs[j].size() != n) throw InvalidArgument("mixed dimensions in from_vectors");
    m.col(static_cast<Eigen::Index>(j)) = vs[j];
  }
  return Subspace::from_columns(m, rel_tol);
}

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

void same_n(const Subspace& a, const Subspace& b) {
  if (a.n() != b.n()) throw InvalidArgument("subspaces live in different ambient dimensions");
}

}  // namespace

double excess(const Subspace& v, const Subspace& w) {
  same_n(v, w);
  if (v.dim() == 0) return 0.0;
  const Eigen::MatrixXd f = v.frame();
  Eigen::MatrixXd r = f;
  if (w.dim() > 0) r -= w.frame() * (w.frame().transpose() * f);
  return std::min(1.0, spectral_norm(r));
}

double d_gr(const Subspace& v, const Subspace& w) { return std::max(excess(v, w), excess(w, v)); }

Subspace intersect(const Subspace& v, const Subspace& w, double tol) {
  same_n(v, w);
  const int n = v.n();
  if (v.dim() == 0 || w.dim() == 0) return Subspace(n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd stacked(2 * n, n);
  stacked.topRows(n) = id - v.projector();
  stacked.bottomRows(n) = id - w.projector();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol * std::max(1.0, sv[0]);
  std::vector<int> null_cols;
  for (int i = 0; i < n; ++i)
    if (sv[i] <= cut) null_cols.push_back(i);
  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(null_cols.size()));
  for (std::size_t j = 0; j < null_cols.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = svd.matrixV().col(null_cols[j]);
  return Subspace::from_columns(basis);
}

Subspace complement(const Subspace& v) {
  const int n = v.n();
  if (v.dim() == 0) return Subspace::whole(n);
  if (v.dim() == n) return Subspace(n);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - v.projector();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  return Subspace::from_columns(svd.matrixU().leftCols(n - v.dim()));
}

Subspace sum(const Subspace& v, const Subspace& w, double rel_tol) {
  same_n(v, w);
  Eigen::MatrixXd m(v.n(), v.dim() + w.dim());
  m << v.frame(), w.frame();
  return Subspace::from_columns(m, rel_tol);
}

double dist(const Eigen::VectorXd& x, const Subspace& v) { return (x - v.project(x)).norm(); }

double max_principal_angle(const Subspace& v, const Subspace& w) {
  same_n(v, w);
  if (v.dim() != w.dim()) return M_PI / 2;
  if (v.dim() == 0) return 0.0;
  const Eigen::MatrixXd c = v.frame().transpose() * w.frame();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  const double smallest = svd.singularValues().minCoeff();
  // Sine form is accurate for tiny angles.
  const Eigen::MatrixXd r = w.frame() - v.frame() * c;
  const double s = std::min(1.0, spectral_norm(r));
  return smallest > 0.7 ? std::asin(s) : std::acos(std::clamp(smallest, 0.0, 1.0));
}

double phi(const Bundle& b, const AtomicMeasure& mu) {
  if (b.size() != mu.size()) throw InvalidArgument("bundle and measure sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += mu[i].w * b[i].dim();
  return s;
}

MinimalElement minimal_element(const std::vector<Bundle>& family, const AtomicMeasure& mu) {
  MinimalElement out;
  if (family.empty()) {
    out.bundle.assign(mu.size(), Subspace::whole(mu.n()));
    out.phi = phi(out.bundle, mu);
    return out;
  }
  for (const Bundle& b : family)
    if (b.size() != mu.size()) throw InvalidArgument("bundle keyed to a different measure");
  out.bundle = family.front();
  for (std::size_t f = 1; f < family.size(); ++f)
    for (std::size_t i = 0; i < mu.size(); ++i) out.bundle[i] = intersect(out.bundle[i], family[f][i]);
  out.phi = phi(out.bundle, mu);
  return out;
}

Bundle essential_span(const std::vector<std::vector<Eigen::VectorXd>>& fields, const AtomicMeasure& mu) {
  for (const auto& f : fields)
    if (f.size() != mu.size()) throw InvalidArgument("field keyed to a different measure");
  Bundle out(mu.size());
  std::vector<Eigen::VectorXd> at;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    at.clear();
    for (const auto& f : fields) at.push_back(f[i]);
    out[i] = from_vectors(mu.n(), at);
  }
  return out;
}

}  // namespace gmk
