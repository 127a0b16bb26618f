#include "gmk/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmk/parallel.hpp"

namespace gmk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double step_length(const Index3& d) { return std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])); }

Index3 shifted(const Index3& c, const Index3& d, int sign) {
  return {c[0] + sign * d[0], c[1] + sign * d[1], c[2] + sign * d[2]};
}

// Nodes grouped by the level p·c, levels ascending.
struct Levels {
  std::vector<std::size_t> order;
  std::vector<std::size_t> start;
};

Levels build_levels(const GridSpec& spec, const Index3& p) {
  int lo = 0, hi = 0;
  for (int a = 0; a < 3; ++a) {
    const int ext = spec.shape[a] - 1;
    lo += std::min(0, p[a] * ext);
    hi += std::max(0, p[a] * ext);
  }
  std::vector<std::size_t> count(static_cast<std::size_t>(hi - lo) + 2, 0);
  const std::size_t total = spec.size();
  std::vector<int> level(total);
  for (std::size_t i = 0; i < total; ++i) {
    const Index3 c = spec.coords(i);
    level[i] = p[0] * c[0] + p[1] * c[1] + p[2] * c[2] - lo;
    ++count[level[i] + 1];
  }
  Levels out;
  out.start.assign(count.size(), 0);
  for (std::size_t l = 1; l < count.size(); ++l) out.start[l] = out.start[l - 1] + count[l];
  out.order.resize(total);
  std::vector<std::size_t> fill(out.start.begin(), out.start.end() - 1);
  for (std::size_t i = 0; i < total; ++i) out.order[fill[level[i]]++] = i;
  return out;
}

struct Sweep {
  std::vector<double> u;
  std::vector<signed char> pred;
  double max_u = 0.0;
  std::size_t argmax = 0;
};

Sweep bellman(const GridSpec& spec, const Levels& levels, const std::vector<Index3>& stencil,
              const std::vector<std::vector<double>>& mid_dist, double delta) {
  Sweep s;
  s.u.assign(spec.size(), 0.0);
  s.pred.assign(spec.size(), -1);
  const double h = spec.spacing;
  for (std::size_t l = 0; l + 1 < levels.start.size(); ++l) {
    const std::size_t b0 = levels.start[l];
    const std::size_t e0 = levels.start[l + 1];
    parallel_for(e0 - b0, [&](std::size_t b, std::size_t e) {
      for (std::size_t t = b0 + b; t < b0 + e; ++t) {
        const std::size_t y = levels.order[t];
        const Index3 c = spec.coords(y);
        double best = 0.0;
        signed char arg = -1;
        for (std::size_t q = 0; q < stencil.size(); ++q) {
          const Index3 from = shifted(c, stencil[q], -1);
          const double base = spec.valid(from) ? s.u[spec.index(from)] : 0.0;
          const double gain = mid_dist[q][y] <= delta ? step_length(stencil[q]) * h : 0.0;
          if (base + gain > best) {
            best = base + gain;
            arg = static_cast<signed char>(q);
          }
        }
        s.u[y] = best;
        s.pred[y] = arg;
      }
    }, 256);
  }
  for (std::size_t i = 0; i < s.u.size(); ++i)
    if (s.u[i] > s.max_u) {
      s.max_u = s.u[i];
      s.argmax = i;
    }
  return s;
}

PolylineCurve backtrack(const GridSpec& spec, const Sweep& s, const std::vector<Index3>& stencil) {
  PolylineCurve path;
  Index3 c = spec.coords(s.argmax);
  std::vector<Point> rev{spec.node(c)};
  while (spec.valid(c)) {
    const signed char q = s.pred[spec.index(c)];
    if (q < 0) break;
    c = shifted(c, stencil[q], -1);
    if (!spec.valid(c)) break;
    rev.push_back(spec.node(c));
  }
  if (rev.size() == 1) rev.push_back(rev.front());
  path.vertices.assign(rev.rbegin(), rev.rend());
  return path;
}

// Lower corner of the cell holding x, clamped so the corner and its +1 neighbours exist.
Index3 cell_of(const GridSpec& spec, const Point& x) {
  Index3 c{0, 0, 0};
  for (int a = 0; a < spec.n; ++a) {
    const int i = static_cast<int>(std::floor((x[a] - spec.origin[a]) / spec.spacing));
    c[a] = std::clamp(i, 0, std::max(0, spec.shape[a] - 2));
  }
  return c;
}

// Edges y → y + p with both ends on the corners of the cell at c.
std::vector<Index3> cell_edges(int n, const Index3& c, const Index3& p) {
  std::vector<Index3> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Index3 q{0, 0, 0};
    bool ok = true;
    for (int a = 0; a < n; ++a) {
      q[a] = (mask >> a) & 1;
      const int t = q[a] + p[a];
      if (t < 0 || t > 1) ok = false;
    }
    if (ok) out.push_back({c[0] + q[0], c[1] + q[1], c[2] + q[2]});
  }
  return out;
}

bool inside_box(const GridSpec& spec, const Point& x) {
  for (int a = 0; a < spec.n; ++a) {
    const double t = (x[a] - spec.origin[a]) / spec.spacing;
    if (t < 0.0 || t > spec.shape[a] - 1) return false;
  }
  return true;
}

}  // namespace

Index3 lattice_step(const Point& e) {
  const int n = static_cast<int>(e.size());
  if (n < 2 || n > 3) throw InvalidArgument("lattice directions need n in {2, 3}");
  const double nrm = e.norm();
  if (!(nrm > 0.0)) throw InvalidArgument("zero cone axis");
  double big = 0.0;
  for (int a = 0; a < n; ++a) big = std::max(big, std::abs(e[a]));
  Index3 p{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    const double t = e[a] / big;
    const long r = std::lround(t);
    if (std::abs(t - static_cast<double>(r)) > 1e-9) throw InvalidArgument("cone axis is not a lattice direction");
    p[a] = static_cast<int>(r);
  }
  return p;
}

std::vector<Index3> cone_stencil(int n, const Index3& p) {
  const double lp = step_length(p);
  std::vector<Index3> out;
  const int kz = n == 3 ? 1 : 0;
  for (int k = -kz; k <= kz; ++k)
    for (int j = -1; j <= 1; ++j)
      for (int i = -1; i <= 1; ++i) {
        const Index3 d{i, j, k};
        const double ld = step_length(d);
        if (ld == 0.0) continue;
        const double dot = static_cast<double>(d[0] * p[0] + d[1] * p[1] + d[2] * p[2]);
        if (dot >= std::cos(0.25 * 3.14159265358979323846) * ld * lp - 1e-12) out.push_back(d);
      }
  // p first: ties in the sweep prefer the straight step.
  std::stable_partition(out.begin(), out.end(), [&](const Index3& d) { return d == p; });
  return out;
}

PerturbationResult perturbation_g(const std::vector<Point>& k, const ConeSpec& cone, double eps, const GridSpec& grid) {
  const int n = grid.n;
  if (cone.e.size() != n) throw InvalidArgument("cone dimension differs from grid");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  for (const Point& x : k)
    if (x.size() != n) throw InvalidArgument("point dimension differs from grid");
  PerturbationResult res;
  res.step = lattice_step(cone.e);
  res.stencil = cone_stencil(n, res.step);
  res.g = GridField(grid, 0.0);
  if (k.empty()) return res;

  const double h = grid.spacing;
  const double delta_min = 2.0 * h;
  const double delta0 = std::max(delta_min, 0.5 * eps);
  const int pad = static_cast<int>(std::ceil(delta0 / h)) + 2;

  Point po = grid.origin;
  std::vector<int> ps(n);
  for (int a = 0; a < n; ++a) {
    po[a] -= pad * h;
    ps[a] = grid.shape[a] + 2 * pad;
  }
  const GridSpec padded(po, h, ps);
  const Levels levels = build_levels(padded, res.step);

  // Distance from each step midpoint (y − d/2) to K, recorded up to delta0.
  std::vector<std::vector<double>> mid(res.stencil.size(), std::vector<double>(padded.size(), kInf));
  for (std::size_t q = 0; q < res.stencil.size(); ++q) {
    const Index3& d = res.stencil[q];
    std::vector<double>& dq = mid[q];
    for (const Point& x : k) {
      Index3 lo{0, 0, 0}, hi{0, 0, 0};
      bool empty = false;
      for (int a = 0; a < n; ++a) {
        const double t = (x[a] - padded.origin[a]) / h + 0.5 * d[a];
        lo[a] = std::max(0, static_cast<int>(std::floor(t - delta0 / h)));
        hi[a] = std::min(padded.shape[a] - 1, static_cast<int>(std::ceil(t + delta0 / h)));
        if (lo[a] > hi[a]) empty = true;
      }
      if (empty) continue;
      for (int c2 = lo[2]; c2 <= hi[2]; ++c2)
        for (int c1 = lo[1]; c1 <= hi[1]; ++c1)
          for (int c0 = lo[0]; c0 <= hi[0]; ++c0) {
            const Index3 c{c0, c1, c2};
            double s = 0.0;
            for (int a = 0; a < n; ++a) {
              const double m = padded.origin[a] + h * (c[a] - 0.5 * d[a]) - x[a];
              s += m * m;
            }
            const std::size_t y = padded.index(c);
            dq[y] = std::min(dq[y], std::sqrt(s));
          }
    }
  }

  Sweep sweep = bellman(padded, levels, res.stencil, mid, delta_min);
  res.iterations = 1;
  if (sweep.max_u > eps)
    throw NotConeNull("set is not cone-null at grid resolution: capture " + std::to_string(sweep.max_u) +
                          " exceeds eps " + std::to_string(eps) + " with delta = 2 spacings",
                      backtrack(padded, sweep, res.stencil));
  double delta = delta0;
  if (delta > delta_min) {
    for (;;) {
      Sweep trial = bellman(padded, levels, res.stencil, mid, delta);
      ++res.iterations;
      if (trial.max_u <= eps) {
        sweep = std::move(trial);
        break;
      }
      const double next = delta * std::clamp(0.98 * eps / trial.max_u, 0.5, 0.9);
      if (next <= delta_min) {
        delta = delta_min;
        break;
      }
      delta = next;
    }
  }
  res.delta = delta;
  res.max_capture = sweep.max_u;

  // g(y) = max(u(y), g(y + p) − |p|Δ), swept against e.
  const double lp = step_length(res.step) * h;
  std::vector<double>& u = sweep.u;
  std::vector<double> g(u.size(), 0.0);
  for (std::size_t l = levels.start.size() - 1; l-- > 0;) {
    const std::size_t b0 = levels.start[l];
    const std::size_t e0 = levels.start[l + 1];
    for (std::size_t t = b0; t < e0; ++t) {
      const std::size_t y = levels.order[t];
      const Index3 nx = shifted(padded.coords(y), res.step, 1);
      double v = u[y];
      if (padded.valid(nx)) v = std::max(v, g[padded.index(nx)] - lp);
      g[y] = v;
    }
  }

  // Largest box radius whose averages over K-cell edges only see steps with midpoint in A.
  int zero_axes = 0, moving_axes = 0;
  for (int a = 0; a < n; ++a) (res.step[a] == 0 ? zero_axes : moving_axes)++;
  int r = 0;
  while (true) {
    const double rr = r + 1.0;
    const double reach = std::sqrt(zero_axes * (rr + 1.0) * (rr + 1.0) + moving_axes * (rr + 0.5) * (rr + 0.5)) * h;
    if (reach > delta || rr > pad - 1) break;
    ++r;
  }
  res.mollifier = r;
  g = box_average(padded, std::move(g), r);

  for (std::size_t i = 0; i < res.g.size(); ++i) {
    const Index3 c = grid.coords(i);
    res.g[i] = g[padded.index({c[0] + pad, c[1] + pad, n == 3 ? c[2] + pad : 0})];
  }
  return res;
}

SlopeReport slope_report(const GridField& g, const Index3& p, const std::vector<Point>& k) {
  const GridSpec& spec = g.spec();
  const int n = spec.n;
  std::vector<Index3> trans;
  const int kz = n == 3 ? 1 : 0;
  for (int c = -kz; c <= kz; ++c)
    for (int b = -1; b <= 1; ++b)
      for (int a = -1; a <= 1; ++a) {
        const Index3 q{a, b, c};
        if (q == Index3{0, 0, 0}) continue;
        if (q[0] * p[0] + q[1] * p[1] + q[2] * p[2] == 0) trans.push_back(q);
      }
  SlopeReport rep;
  rep.min_e = kInf;
  rep.max_e = -kInf;
  rep.min_e_on_k = kInf;
  rep.sup = g.sup_norm();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index3 c = spec.coords(i);
    const double s = forward_slope(g, c, p);
    if (!std::isnan(s)) {
      rep.min_e = std::min(rep.min_e, s);
      rep.max_e = std::max(rep.max_e, s);
    }
    for (const Index3& q : trans) {
      const double t = forward_slope(g, c, q);
      if (!std::isnan(t)) rep.max_transverse = std::max(rep.max_transverse, std::abs(t));
    }
  }
  for (const Point& x : k) {
    if (!inside_box(spec, x)) continue;
    for (const Index3& y : cell_edges(n, cell_of(spec, x), p)) {
      const double s = forward_slope(g, y, p);
      if (std::isnan(s)) continue;
      rep.min_e_on_k = std::min(rep.min_e_on_k, s);
      ++rep.k_edges;
    }
  }
  return rep;
}

GridField localized_bump(const GridField& g, const Point& center, double r, double r_prime, double eps_prime) {
  if (!(r < r_prime)) throw InvalidArgument("localized bump needs r < r_prime");
  if (r < 0.0) throw InvalidArgument("negative bump radius");
  if (center.size() != g.n()) throw InvalidArgument("center dimension differs from grid");
  GridField out(g.spec(), 0.0);
  const double tol = 1e-12 * std::max(1.0, eps_prime);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = (g.spec().node(i) - center).norm();
    if (rho >= r_prime) continue;
    double phi = 1.0;
    if (rho > r) {
      const double s = (r_prime - rho) / (r_prime - r);
      phi = s * s * (3.0 - 2.0 * s);
    }
    if (std::abs(g[i]) > eps_prime + tol) throw InvalidArgument("field exceeds eps_prime inside the bump support");
    out[i] = phi * g[i];
  }
  return out;
}

}  // namespace gmk
