#include "gmk/measures.hpp"

#include <algorithm>
#include <cmath>

#include "gmk/errors.hpp"

namespace gmk {

std::size_t KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (std::int64_t v : k) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

Key quantize(const Point& x, double quant) {
  Key k(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) k[static_cast<std::size_t>(i)] = std::llround(x[i] / quant);
  return k;
}

AtomicMeasure::AtomicMeasure(int n, double quant) : n_(n), quant_(quant) {
  if (n < 1) throw InvalidArgument("measure dimension must be positive");
  if (!(quant > 0)) throw InvalidArgument("quantization step must be positive");
}

std::size_t AtomicMeasure::add(const Point& x, double w) {
  if (x.size() != n_) throw InvalidArgument("atom dimension mismatch");
  if (!(w > 0) || !std::isfinite(w)) throw InvalidArgument("atom weight must be positive and finite");
  auto [it, inserted] = index_.try_emplace(quantize(x, quant_), atoms_.size());
  if (inserted) {
    atoms_.push_back({x, w});
  } else {
    atoms_[it->second].w += w;
  }
  return it->second;
}

std::optional<std::size_t> AtomicMeasure::find(const Point& x) const {
  auto it = index_.find(quantize(x, quant_));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.w;
  return s;
}

double PolylineCurve::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) s += (vertices[i] - vertices[i - 1]).norm();
  return s;
}

VectorAtomMeasure::VectorAtomMeasure(int n, int k, double quant) : n_(n), k_(k), quant_(quant) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("vector measure dimension out of range");
  if (k < 0 || k > n) throw InvalidArgument("vector measure degree out of range");
  if (!(quant > 0)) throw InvalidArgument("quantization step must be positive");
}

std::size_t VectorAtomMeasure::add(const Point& x, const KVector& v) {
  if (x.size() != n_ || v.n() != n_ || v.k() != k_) throw InvalidArgument("vector atom shape mismatch");
  auto [it, inserted] = index_.try_emplace(quantize(x, quant_), atoms_.size());
  if (inserted) {
    atoms_.push_back({x, v});
  } else {
    atoms_[it->second].v += v;
  }
  return it->second;
}

std::optional<std::size_t> VectorAtomMeasure::find(const Point& x) const {
  auto it = index_.find(quantize(x, quant_));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double VectorAtomMeasure::mass() const {
  double s = 0.0;
  for (const VectorAtom& a : atoms_) s += a.v.norm();
  return s;
}

BoundingBox bounding_box(const std::vector<Point>& pts) {
  BoundingBox b;
  if (pts.empty()) return b;
  b.lo = pts.front();
  b.hi = pts.front();
  for (const Point& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

BoundingBox bounding_box(const AtomicMeasure& mu) {
  std::vector<Point> pts;
  pts.reserve(mu.size());
  for (const Atom& a : mu) pts.push_back(a.x);
  return bounding_box(pts);
}

BoundingBox bounding_box(const CurveFamily& family) {
  std::vector<Point> pts;
  for (const auto& m : family.members) pts.insert(pts.end(), m.curve.vertices.begin(), m.curve.vertices.end());
  return bounding_box(pts);
}

int piece_count(double len, double delta) {
  if (!(delta > 0)) throw InvalidArgument("delta must be positive");
  // Guard against len/delta landing a hair above an integer.
  const double r = len / delta;
  return std::max(1, static_cast<int>(std::ceil(r * (1.0 - 1e-12))));
}

namespace {

void add_curve(AtomicMeasure& mu, const PolylineCurve& c, double scale, double delta) {
  const double w_mult = std::abs(c.mult) * scale;
  if (w_mult == 0.0) return;
  for (std::size_t s = 0; s + 1 < c.vertices.size(); ++s) {
    const Point& a = c.vertices[s];
    const Point& b = c.vertices[s + 1];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    const int pieces = piece_count(len, delta);
    const double w = len / pieces * w_mult;
    for (int j = 0; j < pieces; ++j) {
      const double t = (j + 0.5) / pieces;
      mu.add(a + t * (b - a), w);
    }
  }
}

// Per coefficient d with d * w == c whenever a neighbouring double allows it.
KVector exact_quotient(const KVector& v, double w) {
  KVector d(v.n(), v.k());
  for (int i = 0; i < v.size(); ++i) {
    const double c = v[i];
    double q = c / w;
    for (double cand : {q, std::nextafter(q, HUGE_VAL), std::nextafter(q, -HUGE_VAL)}) {
      if (cand * w == c) {
        q = cand;
        break;
      }
    }
    d[i] = q;
  }
  return d;
}

}  // namespace

AtomicMeasure h1_measure(const PolylineCurve& curve, double delta, double quant) {
  const int n = std::max(1, curve.n());
  AtomicMeasure mu(n, quant);
  add_curve(mu, curve, 1.0, delta);
  return mu;
}

AtomicMeasure integrate_family(const CurveFamily& family, double delta, double quant) {
  AtomicMeasure mu(std::max(1, family.n), quant);
  for (const auto& m : family.members) {
    if (!(m.dt > 0)) throw InvalidArgument("family weights must be positive");
    if (m.curve.n() != 0 && m.curve.n() != family.n) throw InvalidArgument("family member dimension mismatch");
    add_curve(mu, m.curve, m.dt, delta);
  }
  return mu;
}

AtomicMeasure restrict(const AtomicMeasure& mu, const PointPredicate& pred) {
  AtomicMeasure out(mu.n(), mu.quant());
  for (const Atom& a : mu)
    if (pred(a.x)) out.add(a.x, a.w);
  return out;
}

AtomicMeasure pushforward_measure(const AtomicMeasure& mu, const PointMap& f) {
  AtomicMeasure out(mu.n(), mu.quant());
  for (const Atom& a : mu) out.add(f(a.x), a.w);
  return out;
}

AtomicMeasure variation_measure(const VectorAtomMeasure& t) {
  AtomicMeasure out(t.n(), t.quant());
  for (const VectorAtom& a : t) {
    const double w = a.v.norm();
    if (w > 0) out.add(a.x, w);
  }
  return out;
}

RadonNikodym radon_nikodym(const VectorAtomMeasure& t, const AtomicMeasure& mu) {
  if (t.n() != mu.n()) throw InvalidArgument("radon_nikodym: dimension mismatch");
  RadonNikodym out;
  out.density.assign(mu.size(), KVector(t.n(), t.k()));
  out.singular = VectorAtomMeasure(t.n(), t.k(), t.quant());
  for (const VectorAtom& a : t) {
    auto i = mu.find(a.x);
    if (i) {
      out.density[*i] = exact_quotient(a.v, mu[*i].w);
    } else {
      out.singular.add(a.x, a.v);
    }
  }
  return out;
}

double default_delta(const BoundingBox& box) {
  const double d = box.diagonal();
  return d > 0 ? d / 64.0 : 1.0 / 64.0;
}

}  // namespace gmk
