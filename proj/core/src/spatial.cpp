#include "gmk/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmk/errors.hpp"
#include "gmk/parallel.hpp"

namespace gmk {

PointGrid::PointGrid(const std::vector<Point>& pts, double cell) : pts_(&pts), cell_(cell) {
  if (!(cell > 0)) throw InvalidArgument("grid cell must be positive");
  if (pts.empty()) return;
  n_ = static_cast<int>(pts.front().size());
  lo_ = cell_of(pts.front());
  hi_ = lo_;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Key k = cell_of(pts[i]);
    for (int d = 0; d < n_; ++d) {
      lo_[d] = std::min(lo_[d], k[d]);
      hi_[d] = std::max(hi_[d], k[d]);
    }
    buckets_[std::move(k)].push_back(i);
  }
}

Key PointGrid::cell_of(const Point& x) const {
  Key k(static_cast<std::size_t>(x.size()));
  for (Eigen::Index d = 0; d < x.size(); ++d) k[d] = static_cast<std::int64_t>(std::floor(x[d] / cell_));
  return k;
}

void PointGrid::within(const Point& x, double radius, const std::function<void(std::size_t)>& fn) const {
  for (std::size_t i : within(x, radius)) fn(i);
}

std::vector<std::size_t> PointGrid::within(const Point& x, double radius) const {
  std::vector<std::size_t> out;
  if (!pts_ || pts_->empty()) return out;
  Key a(static_cast<std::size_t>(n_)), b(static_cast<std::size_t>(n_));
  for (int d = 0; d < n_; ++d) {
    a[d] = std::max(lo_[d], static_cast<std::int64_t>(std::floor((x[d] - radius) / cell_)));
    b[d] = std::min(hi_[d], static_cast<std::int64_t>(std::floor((x[d] + radius) / cell_)));
    if (a[d] > b[d]) return out;
  }
  // Small boxes: dense enumeration; large boxes: bucket scan.
  double box = 1.0;
  for (int d = 0; d < n_; ++d) box *= static_cast<double>(b[d] - a[d] + 1);
  const double r2 = radius * radius;
  auto take = [&](const std::vector<std::size_t>& ids) {
    for (std::size_t i : ids)
      if (((*pts_)[i] - x).squaredNorm() <= r2) out.push_back(i);
  };
  if (box <= 4.0 * static_cast<double>(buckets_.size())) {
    Key k = a;
    while (true) {
      auto it = buckets_.find(k);
      if (it != buckets_.end()) take(it->second);
      int d = 0;
      while (d < n_ && ++k[d] > b[d]) k[d] = a[d], ++d;
      if (d == n_) break;
    }
  } else {
    for (const auto& [k, ids] : buckets_) {
      bool in = true;
      for (int d = 0; d < n_ && in; ++d) in = k[d] >= a[d] && k[d] <= b[d];
      if (in) take(ids);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double PointGrid::nearest_distance(const Point& x, std::size_t skip) const {
  double ub = std::numeric_limits<double>::infinity();
  if (!pts_) return ub;
  for (std::size_t i = 0; i < pts_->size() && i < 2; ++i)
    if (i != skip) ub = std::min(ub, ((*pts_)[i] - x).norm());
  if (!std::isfinite(ub)) return ub;
  for (double r = cell_;; r *= 2.0) {
    r = std::min(r, ub);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : within(x, r))
      if (i != skip) best = std::min(best, ((*pts_)[i] - x).norm());
    if (best <= r || r >= ub) return std::min(best, ub);
  }
}

std::vector<Point> positions(const AtomicMeasure& mu) {
  std::vector<Point> out;
  out.reserve(mu.size());
  for (const Atom& a : mu) out.push_back(a.x);
  return out;
}

double median_nn_distance(const std::vector<Point>& pts) {
  if (pts.size() < 2) return 0.0;
  const BoundingBox box = bounding_box(pts);
  const int n = static_cast<int>(pts.front().size());
  double diag = box.diagonal();
  if (diag == 0.0) return 0.0;
  const double cell = std::max(diag / std::pow(static_cast<double>(pts.size()), 1.0 / n), diag * 1e-9);
  const PointGrid grid(pts, cell);
  std::vector<double> d(pts.size());
  parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) d[i] = grid.nearest_distance(pts[i], i);
  });
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

}  // namespace gmk
