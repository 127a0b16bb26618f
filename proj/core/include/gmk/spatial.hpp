#pragma once

#include <cstddef>
#include <functional>
#include <unordered_map>
#include <vector>

#include "gmk/measures.hpp"

namespace gmk {

// Uniform bucket grid over a fixed point list.
class PointGrid {
 public:
  PointGrid() = default;
  PointGrid(const std::vector<Point>& pts, double cell);

  double cell() const { return cell_; }
  std::size_t size() const { return pts_ ? pts_->size() : 0; }

  // Calls fn(index) for every point with |p - x| <= radius, in increasing index order.
  void within(const Point& x, double radius, const std::function<void(std::size_t)>& fn) const;
  std::vector<std::size_t> within(const Point& x, double radius) const;

  // Distance from x to the closest stored point other than `skip`; +inf if none.
  double nearest_distance(const Point& x, std::size_t skip = static_cast<std::size_t>(-1)) const;

 private:
  Key cell_of(const Point& x) const;

  const std::vector<Point>* pts_ = nullptr;
  double cell_ = 1.0;
  int n_ = 0;
  Key lo_, hi_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> buckets_;
};

std::vector<Point> positions(const AtomicMeasure& mu);

// Median distance from each atom to its nearest neighbour (0 for fewer than two atoms).
double median_nn_distance(const std::vector<Point>& pts);

}  // namespace gmk
