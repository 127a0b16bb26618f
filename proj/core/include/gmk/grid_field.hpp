#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "gmk/measures.hpp"

namespace gmk {

inline constexpr std::size_t kMaxGridNodes = std::size_t{1} << 26;

using Index3 = std::array<int, 3>;

// Regular lattice origin + Δ·(i, j, k); unused axes have extent 1.
struct GridSpec {
  int n = 2;
  Point origin;
  double spacing = 1.0;
  Index3 shape{1, 1, 1};

  GridSpec() = default;
  GridSpec(Point origin, double spacing, const std::vector<int>& shape);

  // Smallest lattice-aligned grid (nodes at integer multiples of spacing) covering [lo - pad, hi + pad].
  static GridSpec covering(const Point& lo, const Point& hi, double spacing, double pad = 0.0);

  std::size_t size() const;
  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(shape[0]) *
                                             (static_cast<std::size_t>(j) + static_cast<std::size_t>(shape[1]) * k);
  }
  std::size_t index(const Index3& c) const { return index(c[0], c[1], c[2]); }
  Index3 coords(std::size_t idx) const;
  bool valid(const Index3& c) const;
  Point node(const Index3& c) const;
  Point node(std::size_t idx) const { return node(coords(idx)); }
  // Lattice coordinates of the node nearest to x (may lie outside the grid).
  Index3 nearest(const Point& x) const;
  bool contains(const Point& x) const;

  // Nodes [lo, hi] (inclusive, clipped) of this lattice as a grid of their own.
  GridSpec sub(const Index3& lo, const Index3& hi) const;
  // Node offset of `inner` inside this grid; inner must lie on the same lattice.
  Index3 offset_of(const GridSpec& inner) const;
};

class GridField {
 public:
  GridField() = default;
  explicit GridField(GridSpec spec, double fill = 0.0);
  static GridField sample(const GridSpec& spec, const std::function<double(const Point&)>& fn);

  const GridSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  double spacing() const { return spec_.spacing; }
  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double& at(const Index3& c) { return values_[spec_.index(c)]; }
  double at(const Index3& c) const { return values_[spec_.index(c)]; }

  // Multilinear interpolation; throws InvalidArgument off grid.
  double operator()(const Point& x) const;
  // Max over axis-adjacent node pairs of |difference| / Δ.
  double lipschitz() const;
  double sup_norm() const;

  // Adds s·other on the nodes other covers (same lattice required).
  void add(const GridField& other, double s);
  // Copy of the nodes covered by `window`.
  GridField crop(const GridSpec& window) const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

// Separable average over the (2r+1)^n box, truncated at the grid boundary.
std::vector<double> box_average(const GridSpec& spec, std::vector<double> v, int r);

// (f(y + p) − f(y)) / (|p|Δ) for the lattice step p; NaN when y + p is off grid.
double forward_slope(const GridField& f, const Index3& y, const Index3& p);

}  // namespace gmk
