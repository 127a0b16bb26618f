#include "gmk/currents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmk/errors.hpp"
#include "gmk/parallel.hpp"

namespace gmk {

double Triangle::area() const { return area_vector().norm(); }

KVector Triangle::area_vector() const {
  return wedge(KVector::degree_one(v[1] - v[0]), KVector::degree_one(v[2] - v[0])) * 0.5;
}

ZeroCurrent::ZeroCurrent(int n, double quant) : n_(n), quant_(quant) {}

void ZeroCurrent::add(const Point& x, double w) {
  if (x.size() != n_) throw InvalidArgument("zero-current atom dimension mismatch");
  auto [it, inserted] = index_.try_emplace(quantize(x, quant_), atoms_.size());
  if (inserted) {
    atoms_.push_back({x, w});
  } else {
    atoms_[it->second].w += w;
  }
}

void ZeroCurrent::prune() {
  std::vector<Atom> kept;
  index_.clear();
  for (const Atom& a : atoms_) {
    if (a.w == 0.0) continue;
    index_.emplace(quantize(a.x, quant_), kept.size());
    kept.push_back(a);
  }
  atoms_ = std::move(kept);
}

double ZeroCurrent::total_variation() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += std::abs(a.w);
  return s;
}

FormField constant_form(const KCovector& c) {
  FormField f;
  f.n = c.n();
  f.h = c.k();
  f.eval = [c](const Point&) { return c; };
  f.lip = 0.0;
  f.sup = c.norm();
  return f;
}

FormField scalar_form(int n, std::function<double(const Point&)> fn, double lip, double sup) {
  FormField f;
  f.n = n;
  f.h = 0;
  f.eval = [n, fn = std::move(fn)](const Point& x) { return KCovector::scalar(n, fn(x)); };
  f.lip = lip;
  f.sup = sup;
  return f;
}

PolylineCurrent1 current_from_curve(const PolylineCurve& c) {
  PolylineCurrent1 t;
  t.n = c.n();
  t.pieces.push_back({c.mult, c.vertices});
  return t;
}

PolylineCurrent1 current_from_family(const CurveFamily& family) {
  PolylineCurrent1 t;
  t.n = family.n;
  for (const auto& m : family.members) t.pieces.push_back({m.dt * m.curve.mult, m.curve.vertices});
  return t;
}

namespace {

double polyline_length(const std::vector<Point>& v) {
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) s += (v[i] - v[i - 1]).norm();
  return s;
}

void check_form(const FormField& w, int n, int h) {
  if (w.n != n) throw InvalidArgument("form dimension mismatch");
  if (w.h != h) throw InvalidArgument("form degree mismatch");
}

}  // namespace

double mass(const PolylineCurrent1& t) {
  double s = 0.0;
  for (const Piece1& p : t.pieces) s += std::abs(p.m) * polyline_length(p.vertices);
  return s;
}

double mass(const TriangleMeshCurrent2& t) {
  double s = 0.0;
  for (const Triangle& tr : t.triangles) s += std::abs(tr.m) * tr.area();
  return s;
}

ZeroCurrent boundary(const PolylineCurrent1& t, double quant) {
  ZeroCurrent z(t.n, quant);
  for (const Piece1& p : t.pieces) {
    if (p.vertices.size() < 2 || p.m == 0.0) continue;
    z.add(p.vertices.back(), p.m);
    z.add(p.vertices.front(), -p.m);
  }
  z.prune();
  return z;
}

PolylineCurrent1 boundary2(const TriangleMeshCurrent2& t, double quant) {
  struct Edge {
    Point a, b;
    double m;
  };
  std::vector<Edge> edges;
  std::unordered_map<Key, std::size_t, KeyHash> index;
  double scale = 0.0;
  for (const Triangle& tr : t.triangles) {
    scale = std::max(scale, std::abs(tr.m));
    for (int e = 0; e < 3; ++e) {
      const Point& a = tr.v[e];
      const Point& b = tr.v[(e + 1) % 3];
      Key ka = quantize(a, quant);
      Key kb = quantize(b, quant);
      const bool flip = kb < ka;
      Key key = flip ? kb : ka;
      const Key& second = flip ? ka : kb;
      key.insert(key.end(), second.begin(), second.end());
      auto [it, inserted] = index.try_emplace(key, edges.size());
      if (inserted) edges.push_back({flip ? b : a, flip ? a : b, 0.0});
      edges[it->second].m += flip ? -tr.m : tr.m;
    }
  }
  PolylineCurrent1 out;
  out.n = t.n;
  const double tol = 1e-12 * scale;
  for (const Edge& e : edges) {
    if (std::abs(e.m) <= tol) continue;
    if (e.m > 0) {
      out.pieces.push_back({e.m, {e.a, e.b}});
    } else {
      out.pieces.push_back({-e.m, {e.b, e.a}});
    }
  }
  return out;
}

VectorAtomMeasure atomize(const PolylineCurrent1& t, double delta, double quant) {
  VectorAtomMeasure out(t.n, 1, quant);
  for (const Piece1& p : t.pieces) {
    if (p.m == 0.0) continue;
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
      const Point& a = p.vertices[s];
      const Point& b = p.vertices[s + 1];
      const double len = (b - a).norm();
      if (len == 0.0) continue;
      const int pieces = piece_count(len, delta);
      const KVector v = KVector::degree_one((b - a) * (p.m / pieces));
      for (int j = 0; j < pieces; ++j) out.add(a + ((j + 0.5) / pieces) * (b - a), v);
    }
  }
  return out;
}

VectorAtomMeasure atomize(const TriangleMeshCurrent2& t, double delta, double quant) {
  VectorAtomMeasure out(t.n, 2, quant);
  for (const Triangle& tr : t.triangles) {
    if (tr.m == 0.0) continue;
    const Point& a = tr.v[0];
    const Point ab = tr.v[1] - a;
    const Point ac = tr.v[2] - a;
    const double longest = std::max({ab.norm(), ac.norm(), (tr.v[2] - tr.v[1]).norm()});
    const int nn = piece_count(longest, delta);
    const KVector v = tr.area_vector() * (tr.m / (static_cast<double>(nn) * nn));
    auto at = [&](double i, double j) -> Point { return a + (i / nn) * ab + (j / nn) * ac; };
    for (int i = 0; i < nn; ++i) {
      for (int j = 0; i + j < nn; ++j) {
        out.add(at(i + 1.0 / 3.0, j + 1.0 / 3.0), v);
        if (i + j + 2 <= nn) out.add(at(i + 2.0 / 3.0, j + 2.0 / 3.0), v);
      }
    }
  }
  return out;
}

double pair(const VectorAtomMeasure& t, const FormField& omega) {
  check_form(omega, t.n(), t.k());
  double s = 0.0;
  for (const VectorAtom& a : t) s += pair(omega(a.x), a.v);
  return s;
}

double pair(const ZeroCurrent& t, const FormField& f) {
  check_form(f, t.n(), 0);
  double s = 0.0;
  for (const Atom& a : t.atoms()) s += a.w * f(a.x)[0];
  return s;
}

VectorAtomMeasure interior_current(const VectorAtomMeasure& t, const FormField& omega) {
  if (omega.h > t.k()) throw InvalidArgument("interior_current: form degree exceeds current degree");
  check_form(omega, t.n(), omega.h);
  VectorAtomMeasure out(t.n(), t.k() - omega.h, t.quant());
  for (const VectorAtom& a : t) out.add(a.x, interior_product(a.v, omega(a.x)));
  return out;
}

PolylineCurrent1 pushforward_current(const PolylineCurrent1& t, const PointMap& f, double delta) {
  PolylineCurrent1 out;
  out.n = t.n;
  for (const Piece1& p : t.pieces) {
    std::vector<Point> img;
    auto push = [&](const Point& x) {
      Point y = f(x);
      if (img.empty() || (y - img.back()).norm() > 0.0) img.push_back(std::move(y));
    };
    if (!p.vertices.empty()) push(p.vertices.front());
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
      const Point& a = p.vertices[s];
      const Point& b = p.vertices[s + 1];
      const double len = (b - a).norm();
      if (len == 0.0) continue;
      const int pieces = piece_count(len, delta);
      for (int j = 1; j < pieces; ++j) push(a + (static_cast<double>(j) / pieces) * (b - a));
      push(b);
    }
    if (img.size() >= 2) {
      if (out.n == 0) out.n = static_cast<int>(img.front().size());
      out.pieces.push_back({p.m, std::move(img)});
    }
  }
  return out;
}

std::vector<KCovector> tangential_derivative(const FormField& omega, const VectorAtomMeasure& t, double step) {
  if (!(step > 0)) throw InvalidArgument("step must be positive");
  check_form(omega, t.n(), omega.h);
  if (omega.h + 1 > t.n()) throw InvalidArgument("form degree too large for a derivative");
  std::vector<KCovector> out(t.size(), KCovector(t.n(), omega.h + 1));
  parallel_for(t.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const VectorAtom& a = t[i];
      if (a.v.is_zero()) continue;
      const Eigen::MatrixXd frame = span_of(a.v).frame();
      KCovector d(t.n(), omega.h + 1);
      for (Eigen::Index j = 0; j < frame.cols(); ++j) {
        const Point ej = frame.col(j);
        KCovector diff = omega(a.x + step * ej) - omega(a.x - step * ej);
        diff *= 1.0 / (2.0 * step);
        d += wedge(KCovector::degree_one(ej), diff);
      }
      out[i] = d;
    }
  });
  return out;
}

namespace {

double derivative_term(const FormField& omega, const VectorAtomMeasure& ta, double step) {
  const auto d = tangential_derivative(omega, ta, step);
  double s = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) s += pair(d[i], ta[i].v);
  return s;
}

}  // namespace

double verify_boundary_formula(const PolylineCurrent1& t, const FormField& omega, double delta, double step) {
  check_form(omega, t.n, 0);
  const double lhs = pair(boundary(t), omega);
  const double rhs = derivative_term(omega, atomize(t, delta), step);
  return std::abs(lhs - rhs);
}

double verify_boundary_formula(const TriangleMeshCurrent2& t, const FormField& omega, double delta, double step) {
  check_form(omega, t.n, 1);
  const double lhs = pair(atomize(boundary2(t), delta), omega);
  const double rhs = derivative_term(omega, atomize(t, delta), step);
  return std::abs(lhs - rhs);
}

double verify_interior_boundary(const TriangleMeshCurrent2& t, const FormField& omega, double delta, double step) {
  if (omega.h != 0 && omega.h != 1) throw InvalidArgument("interior boundary check needs a 0- or 1-form");
  check_form(omega, t.n, omega.h);
  const int n = t.n;
  const VectorAtomMeasure ta = atomize(t, delta);
  const VectorAtomMeasure tb = atomize(boundary2(t), delta);
  const auto d = tangential_derivative(omega, ta, step);
  double worst = 0.0;

  if (omega.h == 1) {
    // Probes σ = 1 and σ = x_i.
    for (int i = -1; i < n; ++i) {
      auto sigma = [i](const Point& x) { return i < 0 ? 1.0 : x[i]; };
      const KCovector dsigma = i < 0 ? KCovector(n, 1) : KCovector::basis(n, make_multi_index({i + 1}));
      double lhs = 0.0;
      for (const VectorAtom& a : ta) lhs += pair(dsigma, interior_product(a.v, omega(a.x)));
      double bdry = 0.0;
      for (const VectorAtom& a : tb) bdry += pair(omega(a.x), a.v) * sigma(a.x);
      double inner = 0.0;
      for (std::size_t k = 0; k < ta.size(); ++k) inner += pair(d[k], ta[k].v) * sigma(ta[k].x);
      worst = std::max(worst, std::abs(lhs + (bdry - inner)));
    }
    return worst;
  }

  // Probes σ = e*_j and σ = x_i e*_j.
  for (int j = 0; j < n; ++j) {
    const KCovector ej = KCovector::basis(n, make_multi_index({j + 1}));
    for (int i = -1; i < n; ++i) {
      if (i == j) continue;
      auto sigma = [&, i](const Point& x) { return i < 0 ? ej : ej * x[i]; };
      const KCovector dsigma =
          i < 0 ? KCovector(n, 2) : wedge(KCovector::basis(n, make_multi_index({i + 1})), ej);
      double lhs = 0.0;
      for (const VectorAtom& a : ta) lhs += omega(a.x)[0] * pair(dsigma, a.v);
      double bdry = 0.0;
      for (const VectorAtom& a : tb) bdry += omega(a.x)[0] * pair(sigma(a.x), a.v);
      double inner = 0.0;
      for (std::size_t k = 0; k < ta.size(); ++k) inner += pair(wedge(d[k], sigma(ta[k].x)), ta[k].v);
      worst = std::max(worst, std::abs(lhs - (bdry - inner)));
    }
  }
  return worst;
}

double verify_pushforward_formula(const PolylineCurrent1& t, const PointMap& f, const FormField& omega,
                                  double delta, double step) {
  check_form(omega, t.n, 1);
  if (!(step > 0)) throw InvalidArgument("step must be positive");
  const double lhs = pair(atomize(pushforward_current(t, f, delta), delta), omega);
  const VectorAtomMeasure ta = atomize(t, delta);
  double rhs = 0.0;
  for (const VectorAtom& a : ta) {
    const Point v(Eigen::Map<const Eigen::VectorXd>(a.v.coeffs().data(), t.n));
    const double len = v.norm();
    if (len == 0.0) continue;
    const Point u = v / len;
    const Point df = (f(a.x + step * u) - f(a.x - step * u)) * (len / (2.0 * step));
    rhs += pair(omega(f(a.x)), KVector::degree_one(df));
  }
  return std::abs(lhs - rhs);
}

std::vector<Point> default_cone_candidates(const Point& center, double r) {
  const int n = static_cast<int>(center.size());
  constexpr int kSide = 16;
  std::vector<Point> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Point p = center;
    for (int d = 0; d < n; ++d) p[d] += r * (-1.0 + (2.0 * idx[static_cast<std::size_t>(d)] + 1.0) / kSide);
    if ((p - center).norm() < r) out.push_back(p);
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == kSide) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == n) break;
  }
  return out;
}

namespace {

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double dd = d.squaredNorm();
  double s = dd > 0 ? (x - a).dot(d) / dd : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (x - (a + s * d)).norm();
}

}  // namespace

ConeClosureResult cone_closure(const PolylineCurrent1& t, const Point& center, double r,
                               const ConeClosureOptions& opt) {
  if (!(r > 0)) throw InvalidArgument("cone_closure: radius must be positive");
  if (center.size() != t.n) throw InvalidArgument("cone_closure: center dimension mismatch");
  const double delta = opt.delta > 0 ? opt.delta : r / 32.0;
  const double on_sphere = r * (1.0 - 1e-9);

  if (opt.require_closed_in_ball) {
    const ZeroCurrent bt = boundary(t);
    for (const Atom& a : bt.atoms())
      if ((a.x - center).norm() < on_sphere) throw InvalidArgument("cone_closure: boundary of T has atoms inside the ball");
  }

  // Runs of T inside the closed ball, cut exactly at sphere crossings and refined.
  std::vector<Piece1> runs;
  double mass_in = 0.0;
  for (const Piece1& p : t.pieces) {
    if (p.m == 0.0) continue;
    std::vector<Point> run;
    auto flush = [&] {
      if (run.size() >= 2) {
        mass_in += std::abs(p.m) * polyline_length(run);
        runs.push_back({p.m, run});
      }
      run.clear();
    };
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
      const Point& a = p.vertices[s];
      const Point d = p.vertices[s + 1] - a;
      const double qa = d.squaredNorm();
      if (qa == 0.0) continue;
      const double qb = d.dot(a - center);
      const double qc = (a - center).squaredNorm() - r * r;
      std::vector<double> cuts{0.0};
      const double disc = qb * qb - qa * qc;
      if (disc > 0) {
        const double sq = std::sqrt(disc);
        for (double root : {(-qb - sq) / qa, (-qb + sq) / qa})
          if (root > 1e-12 && root < 1.0 - 1e-12) cuts.push_back(root);
      }
      cuts.push_back(1.0);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const Point x = c == 0 ? a : Point(a + cuts[c] * d);
        const Point y = c + 2 == cuts.size() ? Point(p.vertices[s + 1]) : Point(a + cuts[c + 1] * d);
        const Point mid = 0.5 * (x + y);
        if ((mid - center).norm() >= r) {
          flush();
          continue;
        }
        if (run.empty()) run.push_back(x);
        const int pieces = piece_count((y - x).norm(), delta);
        for (int j = 1; j < pieces; ++j) run.push_back(x + (static_cast<double>(j) / pieces) * (y - x));
        run.push_back(y);
      }
    }
    flush();
  }

  std::vector<Point> cands = opt.candidates.empty() ? default_cone_candidates(center, r) : opt.candidates;
  std::vector<Atom> quad;
  for (const Piece1& run : runs)
    for (std::size_t s = 0; s + 1 < run.vertices.size(); ++s)
      quad.push_back({0.5 * (run.vertices[s] + run.vertices[s + 1]),
                      std::abs(run.m) * (run.vertices[s + 1] - run.vertices[s]).norm()});

  ConeClosureResult res;
  res.u.n = t.n;
  res.mass_in_ball = mass_in;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const Point& c : cands) {
    if ((c - center).norm() >= r) continue;
    bool near = false;
    for (const Piece1& p : t.pieces) {
      for (std::size_t s = 0; s + 1 < p.vertices.size() && !near; ++s)
        near = point_segment_distance(c, p.vertices[s], p.vertices[s + 1]) <= 1e-6;
      if (near) break;
    }
    if (near) continue;
    double cost = 0.0;
    for (const Atom& q : quad) cost += q.w / (q.x - c).norm();
    if (cost < best) {
      best = cost;
      res.x0 = c;
      found = true;
    }
  }
  if (!found) throw InvalidArgument("cone_closure: no valid projection center");

  const Point x0 = res.x0;
  auto project = [&](const Point& x) -> Point {
    if ((x - center).norm() >= on_sphere) return x;
    const Point d = x - x0;
    const double qa = d.squaredNorm();
    const double qb = d.dot(x0 - center);
    const double qc = (x0 - center).squaredNorm() - r * r;
    const double s = (-qb + std::sqrt(qb * qb - qa * qc)) / qa;
    return x0 + s * d;
  };

  for (const Piece1& run : runs) {
    res.u.pieces.push_back(run);
    std::vector<Point> img;
    for (const Point& x : run.vertices) {
      Point y = project(x);
      if (img.empty() || (y - img.back()).norm() > 0.0) img.push_back(std::move(y));
    }
    if (img.size() >= 2) res.u.pieces.push_back({-run.m, std::move(img)});
  }
  res.constant = mass_in > 0 ? mass(res.u) / mass_in : 0.0;
  return res;
}

}  // namespace gmk
