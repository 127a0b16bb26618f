#include "gmk/generators.hpp"

#include <cmath>
#include <string>

#include "gmk/errors.hpp"

namespace gmk {

namespace {

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxDepth)
    throw ResourceError("depth " + std::to_string(depth) + " outside [0, " + std::to_string(kMaxDepth) + "]");
}

// Interval centers of a two-piece self-similar set with the given ratio.
std::vector<double> two_piece_centers(int depth, double ratio) {
  std::vector<double> lo{0.0};
  double len = 1.0;
  for (int d = 0; d < depth; ++d) {
    std::vector<double> next;
    next.reserve(lo.size() * 2);
    for (double a : lo) {
      next.push_back(a);
      next.push_back(a + len * (1.0 - ratio));
    }
    lo = std::move(next);
    len *= ratio;
  }
  for (double& a : lo) a += 0.5 * len;
  return lo;
}

}  // namespace

AtomicMeasure cantor_dust(int depth, int n, double quant) {
  check_depth(depth);
  if (n < 1 || n > 3) throw InvalidArgument("cantor_dust supports n in [1, 3]");
  const std::vector<double> c = two_piece_centers(depth, 0.25);
  const std::size_t m = c.size();
  std::size_t count = 1;
  for (int d = 0; d < n; ++d) count *= m;
  AtomicMeasure mu(n, quant);
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t flat = 0; flat < count; ++flat) {
    Point x(n);
    std::size_t r = flat;
    for (int d = 0; d < n; ++d) {
      x[d] = c[r % m];
      r /= m;
    }
    mu.add(x, w);
  }
  return mu;
}

std::vector<double> middle_thirds_cantor(int depth) {
  check_depth(depth);
  return two_piece_centers(depth, 1.0 / 3.0);
}

AtomicMeasure sierpinski_carpet(int depth, double quant) {
  check_depth(depth);
  std::vector<Eigen::Vector2d> lo{Eigen::Vector2d(0, 0)};
  double len = 1.0;
  for (int d = 0; d < depth; ++d) {
    std::vector<Eigen::Vector2d> next;
    const double s = len / 3.0;
    for (const auto& a : lo)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
          if (i != 1 || j != 1) next.push_back(a + Eigen::Vector2d(i * s, j * s));
    lo = std::move(next);
    len /= 3.0;
  }
  AtomicMeasure mu(2, quant);
  const double w = 1.0 / static_cast<double>(lo.size());
  for (const auto& a : lo) mu.add(Point(a + Eigen::Vector2d(0.5 * len, 0.5 * len)), w);
  return mu;
}

AtomicMeasure grid_lebesgue(int n, int m, double quant) {
  if (m < 1 || m > kMaxGrid) throw ResourceError("grid size " + std::to_string(m) + " outside [1, 512]");
  if (n < 1 || n > 3) throw InvalidArgument("grid_lebesgue supports n in [1, 3]");
  std::size_t count = 1;
  for (int d = 0; d < n; ++d) count *= static_cast<std::size_t>(m);
  if (count > (std::size_t{1} << 24)) throw ResourceError("grid has too many cells");
  AtomicMeasure mu(n, quant);
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t flat = 0; flat < count; ++flat) {
    Point x(n);
    std::size_t r = flat;
    for (int d = 0; d < n; ++d) {
      x[d] = (static_cast<double>(r % m) + 0.5) / m;
      r /= static_cast<std::size_t>(m);
    }
    mu.add(x, w);
  }
  return mu;
}

PolylineCurve koch_curve(int depth) {
  check_depth(depth);
  std::vector<Eigen::Vector2d> v{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)};
  const double c = 0.5, s = std::sqrt(3.0) / 2.0;
  for (int d = 0; d < depth; ++d) {
    std::vector<Eigen::Vector2d> next{v.front()};
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const Eigen::Vector2d a = v[i], b = v[i + 1];
      const Eigen::Vector2d t = (b - a) / 3.0;
      const Eigen::Vector2d p = a + t, q = a + 2.0 * t;
      const Eigen::Vector2d peak = p + Eigen::Vector2d(c * t.x() - s * t.y(), s * t.x() + c * t.y());
      next.insert(next.end(), {p, peak, q, b});
    }
    v = std::move(next);
  }
  PolylineCurve out;
  for (const auto& x : v) out.vertices.emplace_back(x);
  return out;
}

PolylineCurve circle_curve(int k, double radius, const Point& center) {
  if (k < 3) throw InvalidArgument("circle needs at least 3 vertices");
  if (center.size() != 2) throw InvalidArgument("circle center must be planar");
  PolylineCurve c;
  for (int i = 0; i <= k; ++i) {
    const double t = 2 * M_PI * (i % k) / k;
    c.vertices.push_back(center + radius * Eigen::Vector2d(std::cos(t), std::sin(t)));
  }
  return c;
}

PolylineCurve segment_curve(const Point& a, const Point& b) { return {{a, b}, 1.0}; }

}  // namespace gmk
