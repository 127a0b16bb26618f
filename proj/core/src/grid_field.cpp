#include "gmk/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmk/errors.hpp"
#include "gmk/parallel.hpp"

namespace gmk {

GridSpec::GridSpec(Point o, double h, const std::vector<int>& s) : n(static_cast<int>(o.size())), origin(std::move(o)), spacing(h) {
  if (n != 2 && n != 3) throw InvalidArgument("grid dimension must be 2 or 3");
  if (static_cast<int>(s.size()) != n) throw InvalidArgument("grid shape length differs from dimension");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  for (int a = 0; a < n; ++a) {
    if (s[a] < 1) throw InvalidArgument("grid extent must be positive");
    shape[a] = s[a];
  }
  if (size() > kMaxGridNodes) throw ResourceError("grid has " + std::to_string(size()) + " nodes, limit is 2^26");
}

GridSpec GridSpec::covering(const Point& lo, const Point& hi, double h, double pad) {
  const int n = static_cast<int>(lo.size());
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  Point o(n);
  std::vector<int> s(n);
  for (int a = 0; a < n; ++a) {
    const double a0 = std::floor((lo[a] - pad) / h);
    const double a1 = std::ceil((hi[a] + pad) / h);
    if (a1 - a0 + 1 > static_cast<double>(kMaxGridNodes)) throw ResourceError("grid extent exceeds node limit");
    o[a] = a0 * h;
    s[a] = static_cast<int>(a1 - a0) + 1;
  }
  return GridSpec(o, h, s);
}

std::size_t GridSpec::size() const {
  return static_cast<std::size_t>(shape[0]) * static_cast<std::size_t>(shape[1]) * static_cast<std::size_t>(shape[2]);
}

Index3 GridSpec::coords(std::size_t idx) const {
  Index3 c{0, 0, 0};
  c[0] = static_cast<int>(idx % shape[0]);
  idx /= shape[0];
  c[1] = static_cast<int>(idx % shape[1]);
  c[2] = static_cast<int>(idx / shape[1]);
  return c;
}

bool GridSpec::valid(const Index3& c) const {
  for (int a = 0; a < 3; ++a)
    if (c[a] < 0 || c[a] >= shape[a]) return false;
  return true;
}

Point GridSpec::node(const Index3& c) const {
  Point x(n);
  for (int a = 0; a < n; ++a) x[a] = origin[a] + spacing * c[a];
  return x;
}

Index3 GridSpec::nearest(const Point& x) const {
  Index3 c{0, 0, 0};
  for (int a = 0; a < n; ++a) c[a] = static_cast<int>(std::lround((x[a] - origin[a]) / spacing));
  return c;
}

bool GridSpec::contains(const Point& x) const {
  if (x.size() != n) return false;
  const double slack = 1e-9 * spacing;
  for (int a = 0; a < n; ++a) {
    const double t = x[a] - origin[a];
    if (t < -slack || t > spacing * (shape[a] - 1) + slack) return false;
  }
  return true;
}

GridSpec GridSpec::sub(const Index3& lo, const Index3& hi) const {
  std::vector<int> s(n);
  Point o(n);
  for (int a = 0; a < n; ++a) {
    const int l = std::clamp(lo[a], 0, shape[a] - 1);
    const int h = std::clamp(hi[a], 0, shape[a] - 1);
    if (h < l) throw InvalidArgument("empty sub-grid");
    s[a] = h - l + 1;
    o[a] = origin[a] + spacing * l;
  }
  return GridSpec(o, spacing, s);
}

Index3 GridSpec::offset_of(const GridSpec& inner) const {
  if (inner.n != n || inner.spacing != spacing) throw InvalidArgument("grids are not on the same lattice");
  Index3 off{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    const double t = (inner.origin[a] - origin[a]) / spacing;
    off[a] = static_cast<int>(std::lround(t));
    if (std::abs(t - off[a]) > 1e-6) throw InvalidArgument("grids are not on the same lattice");
  }
  return off;
}

GridField::GridField(GridSpec spec, double fill) : spec_(std::move(spec)), values_(spec_.size(), fill) {}

GridField GridField::sample(const GridSpec& spec, const std::function<double(const Point&)>& fn) {
  GridField f(spec);
  parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) f.values_[i] = fn(spec.node(i));
  });
  return f;
}

double GridField::operator()(const Point& x) const {
  if (!spec_.contains(x)) throw InvalidArgument("point outside grid");
  const int n = spec_.n;
  Index3 base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    const double t = (x[a] - spec_.origin[a]) / spec_.spacing;
    if (spec_.shape[a] == 1) continue;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, spec_.shape[a] - 2);
    base[a] = i;
    frac[a] = std::clamp(t - i, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    Index3 c = base;
    for (int a = 0; a < n; ++a) {
      const bool up = (corner >> a) & 1;
      if (up) {
        if (frac[a] == 0.0) {
          w = 0.0;
          break;
        }
        ++c[a];
        w *= frac[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w != 0.0) acc += w * at(c);
  }
  return acc;
}

double GridField::lipschitz() const {
  const int n = spec_.n;
  double m = 0.0;
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    const Index3 c = spec_.coords(idx);
    for (int a = 0; a < n; ++a) {
      if (c[a] + 1 >= spec_.shape[a]) continue;
      Index3 d = c;
      ++d[a];
      m = std::max(m, std::abs(at(d) - values_[idx]));
    }
  }
  return m / spec_.spacing;
}

double GridField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void GridField::add(const GridField& other, double s) {
  const Index3 off = spec_.offset_of(other.spec_);
  const GridSpec& o = other.spec_;
  for (int k = 0; k < o.shape[2]; ++k)
    for (int j = 0; j < o.shape[1]; ++j)
      for (int i = 0; i < o.shape[0]; ++i) {
        const Index3 c{i + off[0], j + off[1], k + off[2]};
        if (!spec_.valid(c)) throw InvalidArgument("added field extends past the grid");
        at(c) += s * other.at({i, j, k});
      }
}

GridField GridField::crop(const GridSpec& window) const {
  const Index3 off = spec_.offset_of(window);
  GridField out(window);
  for (int k = 0; k < window.shape[2]; ++k)
    for (int j = 0; j < window.shape[1]; ++j)
      for (int i = 0; i < window.shape[0]; ++i) {
        const Index3 c{i + off[0], j + off[1], k + off[2]};
        if (!spec_.valid(c)) throw InvalidArgument("crop window extends past the grid");
        out.at({i, j, k}) = at(c);
      }
  return out;
}

std::vector<double> box_average(const GridSpec& spec, std::vector<double> v, int r) {
  if (r <= 0) return v;
  std::vector<double> tmp(v.size());
  for (int a = 0; a < spec.n; ++a) {
    const int len = spec.shape[a];
    parallel_for(v.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Index3 c = spec.coords(i);
        const int x = c[a];
        double acc = 0.0;
        int cnt = 0;
        for (int t = std::max(0, x - r); t <= std::min(len - 1, x + r); ++t) {
          c[a] = t;
          acc += v[spec.index(c)];
          ++cnt;
        }
        tmp[i] = acc / cnt;
      }
    });
    v.swap(tmp);
  }
  return v;
}

double forward_slope(const GridField& f, const Index3& y, const Index3& p) {
  const Index3 z{y[0] + p[0], y[1] + p[1], y[2] + p[2]};
  if (!f.spec().valid(z) || !f.spec().valid(y)) return std::numeric_limits<double>::quiet_NaN();
  const double len = std::sqrt(static_cast<double>(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])) * f.spacing();
  return (f.at(z) - f.at(y)) / len;
}

}  // namespace gmk
