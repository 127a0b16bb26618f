#include "gmk/quotients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmk/errors.hpp"
#include "gmk/measures.hpp"
#include "gmk/parallel.hpp"

namespace gmk {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_ladder(double sigma, const std::vector<double>& ladder) {
  if (ladder.empty()) throw InvalidArgument("empty h-ladder");
  if (std::abs(ladder.front() - sigma) > 1e-12 * sigma) throw InvalidArgument("h-ladder must start at sigma");
  for (std::size_t j = 1; j < ladder.size(); ++j)
    if (std::abs(ladder[j] - 0.5 * ladder[j - 1]) > 1e-12 * ladder[j - 1])
      throw InvalidArgument("h-ladder must halve at every step");
}

QuotientRow evaluate(const ScalarFn& f, const Point& x, const Point& v, double sigma, const std::vector<double>& ladder) {
  QuotientRow row;
  row.v = v;
  row.sigma = sigma;
  row.h = ladder;
  const double f0 = f(x);
  row.q.reserve(ladder.size());
  for (double h : ladder) row.q.push_back((f(x + h * v) - f0) / h);
  row.t_plus = *std::max_element(row.q.begin(), row.q.end());
  row.t_minus = *std::min_element(row.q.begin(), row.q.end());
  row.u = row.t_plus - row.t_minus;
  const std::size_t deep = std::max<std::size_t>(1, (row.q.size() + 2) / 3);
  row.d_plus = *std::max_element(row.q.end() - deep, row.q.end());
  row.d_minus = *std::min_element(row.q.end() - deep, row.q.end());
  row.u_by_sigma.assign(row.q.size(), 0.0);
  double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = row.q.size(); j-- > 0;) {
    hi = std::max(hi, row.q[j]);
    lo = std::min(lo, row.q[j]);
    row.u_by_sigma[j] = hi - lo;
  }
  return row;
}

}  // namespace

std::vector<double> dyadic_ladder(double sigma, double min_h) {
  std::vector<double> out;
  if (!(sigma > 0.0)) return out;
  for (double h = sigma; h >= min_h * (1.0 - 1e-12); h *= 0.5) {
    out.push_back(h);
    if (out.size() > 200) break;
  }
  return out;
}

QuotientRow difference_quotients(const GridField& f, const Point& x, const Point& v, double sigma,
                                 const std::vector<double>& ladder) {
  check_ladder(sigma, ladder);
  if (ladder.back() < 2.0 * f.spacing() * (1.0 - 1e-12)) throw InvalidArgument("h-ladder goes below two grid spacings");
  if (!f.spec().contains(x) || !f.spec().contains(x + sigma * v)) throw InvalidArgument("x + sigma v is off grid");
  return evaluate([&](const Point& p) { return f(p); }, x, v, sigma, ladder);
}

QuotientRow difference_quotients(const ScalarFn& f, const Point& x, const Point& v, double sigma,
                                 const std::vector<double>& ladder) {
  check_ladder(sigma, ladder);
  return evaluate(f, x, v, sigma, ladder);
}

double deviation_from_linearity(const ScalarFn& f, const Point& x, const std::vector<Point>& increments,
                                const Point& alpha) {
  const double f0 = f(x);
  double m = 0.0;
  for (const Point& h : increments) {
    const double len = h.norm();
    if (!(len > 0.0)) continue;
    m = std::max(m, std::abs(f(x + h) - f0 - alpha.dot(h)) / len);
  }
  return m;
}

std::vector<Point> deviation_increments(const Subspace& v, double delta, const DeviationSampling& s) {
  std::vector<Point> out;
  const int k = v.dim();
  if (k == 0 || !(delta > 0.0)) return out;
  const int m = std::max(1, s.resolution);
  std::vector<Eigen::VectorXd> dirs;
  std::vector<int> idx(k, -m);
  for (;;) {
    Eigen::VectorXd a(k);
    for (int i = 0; i < k; ++i) a[i] = idx[i];
    if (a.norm() > 0.0) dirs.push_back(v.frame() * a.normalized());
    int pos = 0;
    while (pos < k && idx[pos] == m) idx[pos++] = -m;
    if (pos == k) break;
    ++idx[pos];
  }
  for (int j = 0; j < s.levels; ++j) {
    const double r = std::ldexp(delta, -j);
    for (const auto& d : dirs) out.push_back(r * d);
  }
  return out;
}

double deviation_from_linearity(const ScalarFn& f, const Point& x, const Subspace& v, const Point& alpha,
                                double delta, const DeviationSampling& s) {
  return deviation_from_linearity(f, x, deviation_increments(v, delta, s), alpha);
}

NondiffCheck check_nondiff(const GridField& f, const AtomicMeasure& mu, const Bundle& bundle,
                           const std::vector<Point>& directions, const std::vector<double>& sigmas, double tol) {
  if (directions.empty()) throw InvalidArgument("check_nondiff needs at least one direction");
  if (bundle.size() != mu.size()) throw InvalidArgument("bundle size differs from measure");
  const int n = mu.n();
  for (const Point& v : directions)
    if (v.size() != n) throw InvalidArgument("direction dimension differs from measure");
  std::vector<double> sorted = sigmas;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t nd = directions.size();
  NondiffCheck out;
  out.rows.resize(mu.size() * nd);
  out.atom_pass.assign(mu.size(), 0);
  const double min_h = 2.0 * f.spacing();
  parallel_for(mu.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Point& x = mu[i].x;
      const Subspace& vx = bundle[i];
      const int d = n - vx.dim();
      bool all = true;
      for (std::size_t j = 0; j < nd; ++j) {
        const Point& v = directions[j];
        const double rhs = d > 0 ? dist(v, vx) / (3.0 * std::sqrt(static_cast<double>(d))) : 0.0;
        QuotientRow row;
        bool done = false;
        for (double s : sorted) {
          const std::vector<double> ladder = dyadic_ladder(s, min_h);
          if (ladder.empty() || !f.spec().contains(x) || !f.spec().contains(x + s * v)) continue;
          row = difference_quotients(f, x, v, s, ladder);
          done = true;
          break;
        }
        if (!done) {
          row.v = v;
          row.sigma = row.t_plus = row.t_minus = row.u = row.d_plus = row.d_minus = kNaN;
        }
        row.atom = i;
        row.rhs = rhs;
        row.pass = rhs <= 0.0 || (done && row.u >= rhs - tol);
        all = all && row.pass;
        out.rows[i * nd + j] = std::move(row);
      }
      out.atom_pass[i] = all ? 1 : 0;
    }
  }, 16);
  const double total = mu.total_mass();
  double pass = 0.0;
  out.direction_fraction.assign(nd, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (out.atom_pass[i]) pass += mu[i].w;
    for (std::size_t j = 0; j < nd; ++j)
      if (out.rows[i * nd + j].pass) out.direction_fraction[j] += mu[i].w;
  }
  if (total > 0.0) {
    out.pass_fraction = pass / total;
    for (double& x : out.direction_fraction) x /= total;
  }
  return out;
}

}  // namespace gmk
