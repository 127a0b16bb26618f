#include "gmk/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gmk/errors.hpp"
#include "gmk/parallel.hpp"
#include "gmk/spatial.hpp"

namespace gmk {
namespace {

constexpr int kMaxBoxRadius = 32;

double unit_ball_volume(int k) {
  // c_0 = 1, c_1 = 2, c_k = c_{k-2}·2π/k.
  if (k == 0) return 1.0;
  if (k == 1) return 2.0;
  return unit_ball_volume(k - 2) * 2.0 * std::numbers::pi / k;
}

// Offsets of a cubic lattice of step ≤ Δ/2 inside the ball of radius r of the span of `frame`.
std::vector<Eigen::VectorXd> ball_samples(const Eigen::MatrixXd& frame, double r, double h) {
  const int k = static_cast<int>(frame.cols());
  const int n = static_cast<int>(frame.rows());
  std::vector<Eigen::VectorXd> out;
  if (k == 0 || r <= 0.0) {
    out.push_back(Eigen::VectorXd::Zero(n));
    return out;
  }
  const int m = std::max(1, static_cast<int>(std::ceil(2.0 * r / h)));
  const double s = r / m;
  std::vector<int> idx(k, -m);
  for (;;) {
    Eigen::VectorXd a(k);
    for (int i = 0; i < k; ++i) a[i] = s * idx[i];
    if (a.norm() <= r * (1.0 + 1e-12)) out.push_back(frame * a);
    int pos = 0;
    while (pos < k && idx[pos] == m) idx[pos++] = -m;
    if (pos == k) break;
    ++idx[pos];
  }
  return out;
}

}  // namespace

double smoothing_constant(int n) {
  double m = 0.0;
  for (int k = 1; k <= n; ++k) m = std::max(m, 18.0 * unit_ball_volume(k - 1) / unit_ball_volume(k));
  return m;
}

RegularizeResult regularize_keep(const GridField& f, const std::vector<Point>& k,
                                 const std::function<double(double)>& phi, double eps) {
  if (k.empty()) throw InvalidArgument("regularize_keep needs a nonempty K");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  const GridSpec& spec = f.spec();
  const int n = spec.n;
  const double h = spec.spacing;
  RegularizeResult res;
  res.lip_in = f.lipschitz();
  res.keep.assign(f.size(), 0);
  for (const Point& x : k) {
    if (x.size() != n) throw InvalidArgument("point dimension differs from grid");
    const Index3 c = spec.nearest(x);
    if (spec.valid(c)) res.keep[spec.index(c)] = 1;
  }

  const PointGrid index(k, std::max(h, 1e-12));
  std::vector<double> d(f.size());
  parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) d[i] = res.keep[i] ? 0.0 : index.nearest_distance(spec.node(i));
  });
  double outer = 0.0;
  for (double x : d) outer = std::max(outer, x);
  res.outer = outer;
  res.g = f;
  if (outer <= 0.0) {
    res.lip_out = res.lip_in;
    return res;
  }

  const double lg = std::sqrt(static_cast<double>(n)) * res.lip_in;
  const double box_unit = lg * h * std::sqrt(static_cast<double>(n));  // error bound per cell of radius
  int levels = 0;
  while (outer * std::ldexp(1.0, -levels) >= h) ++levels;

  std::vector<double> acc(f.size(), 0.0), weight(f.size(), 0.0);
  for (int lvl = 0; lvl < levels; ++lvl) {
    const double inner = outer * std::ldexp(1.0, -lvl - 1);
    const double p = phi(inner);
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("phi must be positive on (0, inf)");
    double budget = std::min({p, eps * outer * std::numbers::ln2 * std::ldexp(1.0, -lvl - 2), inner * (1.0 - 1e-9)});
    int r = box_unit > 0.0 ? static_cast<int>(std::floor(budget / box_unit)) : kMaxBoxRadius;
    r = std::clamp(r, 0, kMaxBoxRadius);
    res.radii.push_back(r);
    const std::vector<double> fk = box_average(spec, f.values(), r);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (res.keep[i] || d[i] <= 0.0) continue;
      const double t = std::log2(outer / d[i]);
      const double w = std::max(0.0, 1.0 - std::abs(t - lvl));
      if (w > 0.0) {
        acc[i] += w * fk[i];
        weight[i] += w;
      }
    }
  }
  for (int lvl = 1; lvl < levels; ++lvl) {
    const double p0 = phi(outer * std::ldexp(1.0, -lvl));
    if (!(p0 > 0.0)) throw InvalidArgument("phi must be positive on (0, inf)");
    if (phi(outer * std::ldexp(1.0, -lvl - 1)) > p0) throw InvalidArgument("phi must be increasing");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (res.keep[i] || d[i] <= 0.0) continue;
    res.g[i] = acc[i] + (1.0 - weight[i]) * f[i];
  }
  res.lip_out = res.g.lipschitz();
  return res;
}

AnisotropicResult anisotropic_smooth(const GridField& f, const Subspace& v, double eps, double r_prime) {
  const GridSpec& spec = f.spec();
  const int n = spec.n;
  if (v.n() != n) throw InvalidArgument("subspace dimension differs from grid");
  if (v.dim() == 0) throw InvalidArgument("anisotropic smoothing needs a nontrivial V");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (r_prime < 2.0 * spec.spacing) throw ResolutionError("kernel smaller than grid cell");
  AnisotropicResult res;
  res.lip = f.lipschitz();
  res.r_par = r_prime;
  res.r_perp = res.lip > 0.0 ? eps * r_prime / res.lip : r_prime;
  res.m = smoothing_constant(n);

  const std::vector<Eigen::VectorXd> along = ball_samples(v.frame(), res.r_par, spec.spacing);
  const std::vector<Eigen::VectorXd> across = ball_samples(complement(v).frame(), res.r_perp, spec.spacing);
  std::vector<Eigen::VectorXd> offsets;
  offsets.reserve(along.size() * across.size());
  for (const auto& a : along)
    for (const auto& b : across) offsets.push_back(a + b);
  res.samples = offsets.size();

  Point lo = spec.origin, hi = spec.origin;
  for (int a = 0; a < n; ++a) hi[a] += spec.spacing * (spec.shape[a] - 1);
  res.f = GridField(spec, 0.0);
  parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Point x = spec.node(i);
      double acc = 0.0;
      for (const auto& z : offsets) acc += f(((x - z).cwiseMax(lo)).cwiseMin(hi));
      res.f[i] = acc / static_cast<double>(offsets.size());
    }
  }, 16);
  return res;
}

}  // namespace gmk
