#include "gmk/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "gmk/errors.hpp"
#include "gmk/parallel.hpp"
#include "gmk/spatial.hpp"

namespace gmk {

ConeSpec::ConeSpec(Point dir, double angle) : e(std::move(dir)), alpha(angle) {
  const double len = e.norm();
  if (!(len > 0)) throw InvalidArgument("cone axis must be nonzero");
  if (!(angle > 0 && angle < M_PI / 2)) throw InvalidArgument("cone angle must lie in (0, pi/2)");
  e /= len;
}

bool ConeSpec::contains(const Point& v) const { return v.dot(e) >= std::cos(alpha) * v.norm(); }

std::vector<ConeSpec> default_cone_net(int n) {
  std::vector<ConeSpec> out;
  if (n == 2) {
    for (int i = 0; i < 8; ++i) {
      const double t = i * M_PI / 4;
      out.emplace_back(Point(Eigen::Vector2d(std::cos(t), std::sin(t))), M_PI / 6);
    }
    return out;
  }
  if (n == 3) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c)
          if (a || b || c) out.emplace_back(Point(Eigen::Vector3d(a, b, c)), 35.0 * M_PI / 180.0);
    return out;
  }
  // Sign patterns over all coordinate subsets cover R^n for any n, at a wide angle.
  for (int mask = 1; mask < (1 << n); ++mask)
    for (int signs = 0; signs < (1 << n); ++signs) {
      if (signs & ~mask) continue;
      Point e = Point::Zero(n);
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) e[i] = (signs >> i & 1) ? -1.0 : 1.0;
      out.emplace_back(e, std::acos(1.0 / std::sqrt(static_cast<double>(n))) * 0.999 + 0.001);
    }
  return out;
}

bool cones_cover(const std::vector<ConeSpec>& cones, int n, double slack) {
  std::vector<Point> dirs;
  if (n == 1) {
    dirs = {Point::Ones(1), Point(-Point::Ones(1))};
  } else if (n == 2) {
    for (int i = 0; i < 7200; ++i) {
      const double t = 2 * M_PI * i / 7200;
      dirs.emplace_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
    }
  } else if (n == 3) {
    const int m = 20000;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < m; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / m;
      const double r = std::sqrt(1 - z * z);
      dirs.emplace_back(Eigen::Vector3d(r * std::cos(golden * i), r * std::sin(golden * i), z));
    }
  } else {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 20000; ++i) {
      Point d(n);
      for (int j = 0; j < n; ++j) d[j] = g(rng);
      dirs.push_back(d.normalized());
    }
  }
  for (const Point& d : dirs) {
    bool hit = false;
    for (const ConeSpec& c : cones) {
      if (c.e.size() != n) throw InvalidArgument("cone dimension mismatch");
      if (std::acos(std::clamp(d.dot(c.e), -1.0, 1.0)) <= c.alpha - slack) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

FlowGraph FlowGraph::from_current(const PolylineCurrent1& t, double quant) {
  FlowGraph g;
  g.n = t.n;
  std::map<Key, int> ids;
  std::vector<Point> first_seen;
  for (const Piece1& p : t.pieces)
    for (const Point& x : p.vertices) {
      auto [it, inserted] = ids.try_emplace(quantize(x, quant), 0);
      if (inserted) first_seen.push_back(x);
    }
  // Lexicographic key order; coordinates come from the first occurrence.
  std::map<Key, Point> coords;
  for (const Point& x : first_seen) coords.try_emplace(quantize(x, quant), x);
  int next = 0;
  for (auto& [k, id] : ids) {
    id = next++;
    g.nodes.push_back(coords.at(k));
  }
  std::map<std::pair<int, int>, double> net;
  double scale = 0.0;
  for (const Piece1& p : t.pieces) {
    if (p.m == 0.0) continue;
    scale = std::max(scale, std::abs(p.m));
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
      const int a = ids.at(quantize(p.vertices[s], quant));
      const int b = ids.at(quantize(p.vertices[s + 1], quant));
      if (a == b) continue;
      if (a < b) {
        net[{a, b}] += p.m;
      } else {
        net[{b, a}] -= p.m;
      }
    }
  }
  for (const auto& [ab, m] : net) {
    if (std::abs(m) <= 1e-13 * scale) continue;
    FlowEdge e;
    e.from = m > 0 ? ab.first : ab.second;
    e.to = m > 0 ? ab.second : ab.first;
    e.m = std::abs(m);
    e.length = (g.nodes[static_cast<std::size_t>(e.to)] - g.nodes[static_cast<std::size_t>(e.from)]).norm();
    g.edges.push_back(e);
  }
  return g;
}

std::vector<double> FlowGraph::divergence() const {
  std::vector<double> d(nodes.size(), 0.0);
  for (const FlowEdge& e : edges) {
    d[static_cast<std::size_t>(e.from)] += e.m;
    d[static_cast<std::size_t>(e.to)] -= e.m;
  }
  return d;
}

Decomposition smirnov_decompose(const PolylineCurrent1& t, double quant) {
  Decomposition out;
  out.graph = FlowGraph::from_current(t, quant);
  const FlowGraph& g = out.graph;
  const std::size_t nn = g.nodes.size();
  std::vector<double> flow(g.edges.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    flow[i] = g.edges[i].m;
    scale = std::max(scale, flow[i]);
  }
  const double tol = 1e-13 * scale;
  std::vector<std::vector<int>> out_edges(nn);
  for (std::size_t i = 0; i < g.edges.size(); ++i) out_edges[static_cast<std::size_t>(g.edges[i].from)].push_back(static_cast<int>(i));
  for (auto& l : out_edges)
    std::sort(l.begin(), l.end(), [&](int a, int b) { return g.edges[static_cast<std::size_t>(a)].to < g.edges[static_cast<std::size_t>(b)].to; });
  std::vector<double> div = g.divergence();
  for (double& d : div)
    if (std::abs(d) <= tol) d = 0.0;

  auto emit = [&](const std::vector<int>& path, bool loop) {
    double b = std::numeric_limits<double>::infinity();
    for (int e : path) b = std::min(b, flow[static_cast<std::size_t>(e)]);
    if (!loop) {
      b = std::min(b, div[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(path.front())].from)]);
      b = std::min(b, -div[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(path.back())].to)]);
    }
    for (int e : path) {
      double& f = flow[static_cast<std::size_t>(e)];
      f = (f == b) ? 0.0 : f - b;
      if (f <= tol) f = 0.0;
    }
    if (!loop) {
      double& ds = div[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(path.front())].from)];
      double& de = div[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(path.back())].to)];
      ds = (ds == b) ? 0.0 : ds - b;
      de = (de == -b) ? 0.0 : de + b;
      if (std::abs(ds) <= tol) ds = 0.0;
      if (std::abs(de) <= tol) de = 0.0;
    }
    DecompositionPiece piece;
    piece.weight = b;
    piece.loop = loop;
    piece.edges = path;
    piece.curve.vertices.push_back(g.nodes[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(path.front())].from)]);
    for (int e : path) piece.curve.vertices.push_back(g.nodes[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].to)]);
    out.pieces.push_back(std::move(piece));
  };

  // Paths drain the boundary first.
  while (true) {
    std::size_t s = 0;
    while (s < nn && !(div[s] > 0)) ++s;
    if (s == nn) break;
    std::vector<int> via(nn, -1);
    std::vector<char> seen(nn, 0);
    std::deque<std::size_t> q{s};
    seen[s] = 1;
    std::size_t target = nn;
    while (!q.empty() && target == nn) {
      const std::size_t x = q.front();
      q.pop_front();
      for (int e : out_edges[x]) {
        if (flow[static_cast<std::size_t>(e)] <= 0) continue;
        const std::size_t y = static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].to);
        if (seen[y]) continue;
        seen[y] = 1;
        via[y] = e;
        if (div[y] < 0) {
          target = y;
          break;
        }
        q.push_back(y);
      }
    }
    if (target == nn) {
      div[s] = 0.0;  // numerically stranded source
      continue;
    }
    std::vector<int> path;
    for (std::size_t y = target; y != s; y = static_cast<std::size_t>(g.edges[static_cast<std::size_t>(via[y])].from))
      path.push_back(via[y]);
    std::reverse(path.begin(), path.end());
    emit(path, false);
  }

  // Remaining flow is circulation.
  while (true) {
    std::size_t s = 0;
    auto first_live = [&](std::size_t x) -> int {
      for (int e : out_edges[x])
        if (flow[static_cast<std::size_t>(e)] > 0) return e;
      return -1;
    };
    while (s < nn && first_live(s) < 0) ++s;
    if (s == nn) break;
    std::vector<int> pos(nn, -1);
    std::vector<int> walk;
    std::size_t x = s;
    bool stuck = false;
    while (pos[x] < 0) {
      pos[x] = static_cast<int>(walk.size());
      const int e = first_live(x);
      if (e < 0) {
        stuck = true;
        break;
      }
      walk.push_back(e);
      x = static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].to);
    }
    if (stuck) {
      flow[static_cast<std::size_t>(walk.back())] = 0.0;
      continue;
    }
    emit(std::vector<int>(walk.begin() + pos[x], walk.end()), true);
  }
  return out;
}

CurveFamily family_from_decomposition(const Decomposition& d) {
  CurveFamily f;
  f.n = d.graph.n;
  for (const DecompositionPiece& p : d.pieces) f.members.push_back({p.weight, p.curve});
  return f;
}

namespace {

struct Neumaier {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

double mass_residual(const Decomposition& d, const PolylineCurrent1& t) {
  Neumaier lhs, rhs;
  for (const DecompositionPiece& p : d.pieces)
    for (int e : p.edges) lhs.add(p.weight * d.graph.edges[static_cast<std::size_t>(e)].length);
  for (const Piece1& p : t.pieces)
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) rhs.add(std::abs(p.m) * (p.vertices[s + 1] - p.vertices[s]).norm());
  return lhs.value() - rhs.value();
}

double reconstruction_error(const Decomposition& d) {
  std::vector<Neumaier> acc(d.graph.edges.size());
  for (const DecompositionPiece& p : d.pieces)
    for (int e : p.edges) acc[static_cast<std::size_t>(e)].add(p.weight);
  double worst = 0.0;
  for (std::size_t i = 0; i < acc.size(); ++i) worst = std::max(worst, std::abs(acc[i].value() - d.graph.edges[i].m));
  return worst;
}

namespace {

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double dd = d.squaredNorm();
  const double s = dd > 0 ? std::clamp((x - a).dot(d) / dd, 0.0, 1.0) : 0.0;
  return (x - (a + s * d)).norm();
}

// Adds the unit direction of every family segment within `radius` of an atom.
void collect_family_directions(const CurveFamily& family, const std::vector<Point>& pts, const PointGrid& grid,
                               double radius, std::vector<std::vector<Point>>& dirs) {
  std::vector<std::size_t> stamp(pts.size(), static_cast<std::size_t>(-1));
  std::size_t seg_id = 0;
  for (const auto& m : family.members) {
    const auto& v = m.curve.vertices;
    for (std::size_t s = 0; s + 1 < v.size(); ++s, ++seg_id) {
      const Point d = v[s + 1] - v[s];
      const double len = d.norm();
      if (len == 0.0) continue;
      const Point u = d / len;
      const double h = grid.cell();
      const int steps = std::max(1, static_cast<int>(std::ceil(len / h)));
      for (int j = 0; j <= steps; ++j) {
        const Point c = v[s] + (std::min(1.0, static_cast<double>(j) / steps)) * d;
        for (std::size_t i : grid.within(c, radius + h)) {
          if (stamp[i] == seg_id) continue;
          if (point_segment_distance(pts[i], v[s], v[s + 1]) <= radius) {
            stamp[i] = seg_id;
            dirs[i].push_back(u);
          }
        }
      }
    }
  }
}

double default_radius(const AtomicMeasure& mu) {
  const double diag = bounding_box(mu).diagonal();
  return std::max(1e-6 * (diag > 0 ? diag : 1.0), 4.0 * mu.quant());
}

double grid_cell_for(const std::vector<Point>& pts, double radius) {
  const BoundingBox box = bounding_box(pts);
  const double diag = box.diagonal();
  const int n = pts.empty() ? 1 : static_cast<int>(pts.front().size());
  const double typical = diag > 0 ? diag / std::pow(static_cast<double>(pts.size()), 1.0 / n) : 1.0;
  return std::max(radius, typical);
}

}  // namespace

Bundle bundle_from_family(const CurveFamily& family, const AtomicMeasure& mu, double radius) {
  if (radius <= 0) radius = default_radius(mu);
  const std::vector<Point> pts = positions(mu);
  const PointGrid grid(pts, grid_cell_for(pts, radius));
  std::vector<std::vector<Point>> dirs(mu.size());
  collect_family_directions(family, pts, grid, radius, dirs);
  Bundle out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = from_vectors(mu.n(), dirs[i]);
  return out;
}

namespace {

// Cone-admissible predecessor lists over atoms sorted by e-coordinate.
class ConeDag {
 public:
  struct Pred {
    std::size_t a;
    double dist;
    double cosang;
  };

  ConeDag(const std::vector<Point>& pts, const ConeSpec& cone, double step_min, double step_max)
      : pts_(pts), preds_(pts.size()) {
    const PointGrid grid(pts, std::max(step_max, 1e-300));
    const double c = std::cos(cone.alpha);
    parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        for (std::size_t i : grid.within(pts[j], step_max)) {
          if (i == j) continue;
          const Point d = pts[j] - pts[i];
          const double len = d.norm();
          if (len < step_min || len > step_max) continue;
          const double along = d.dot(cone.e);
          if (along >= c * len && along > 0) preds_[j].push_back({i, len, along / len});
        }
      }
    });
    order_.resize(pts.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::vector<double> key(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) key[i] = pts[i].dot(cone.e);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  }

  // Maximal-gain chain among active atoms, in chain order.
  std::vector<std::size_t> best_chain(const std::vector<double>& w, const std::vector<char>& active,
                                      double& gain_out) const {
    const std::size_t n = pts_.size();
    std::vector<double> gain(n, -1.0);
    std::vector<std::size_t> prev(n, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (active[i]) total += w[i];
    const double eps = 1e-12 * total;
    std::size_t best = n;
    for (std::size_t j : order_) {
      if (!active[j]) continue;
      double g = 0.0;
      std::size_t from = n;
      const Pred* chosen = nullptr;
      for (const Pred& p : preds_[j]) {
        if (!active[p.a] || gain[p.a] < 0) continue;
        const double ga = gain[p.a];
        bool take = false;
        if (!chosen || ga > g + eps) {
          take = true;
        } else if (ga >= g - eps) {
          if (p.dist < chosen->dist - 1e-12 * p.dist) {
            take = true;
          } else if (p.dist <= chosen->dist + 1e-12 * p.dist) {
            take = p.cosang > chosen->cosang + 1e-15 || (p.cosang >= chosen->cosang - 1e-15 && p.a < from);
          }
        }
        if (take) {
          g = ga;
          from = p.a;
          chosen = &p;
        }
      }
      gain[j] = w[j] + g;
      prev[j] = from;
      if (best == n || gain[j] > gain[best] + eps) best = j;
    }
    std::vector<std::size_t> chain;
    gain_out = best == n ? 0.0 : gain[best];
    for (std::size_t x = best; x != n; x = prev[x]) chain.push_back(x);
    std::reverse(chain.begin(), chain.end());
    return chain;
  }

 private:
  const std::vector<Point>& pts_;
  std::vector<std::vector<Pred>> preds_;
  std::vector<std::size_t> order_;
};

// H¹ of the polyline inside the union of closed rho-balls around the points.
double covered_length(const std::vector<Point>& verts, const std::vector<Point>& pts, const PointGrid& grid,
                      double rho) {
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < verts.size(); ++s) {
    const Point& a = verts[s];
    const Point d = verts[s + 1] - a;
    const double len = d.norm();
    if (len == 0.0) continue;
    const Point u = d / len;
    std::vector<std::pair<double, double>> iv;
    const int steps = std::max(1, static_cast<int>(std::ceil(len / grid.cell())));
    std::vector<char> seen;
    std::vector<std::size_t> hits;
    for (int j = 0; j <= steps; ++j) {
      const Point c = a + std::min(1.0, static_cast<double>(j) / steps) * d;
      for (std::size_t i : grid.within(c, rho + grid.cell())) hits.push_back(i);
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    for (std::size_t i : hits) {
      const Point r = pts[i] - a;
      const double t = r.dot(u);
      const double h2 = rho * rho - (r.squaredNorm() - t * t);
      if (h2 <= 0) continue;
      const double h = std::sqrt(h2);
      const double lo = std::max(0.0, t - h), hi = std::min(len, t + h);
      if (hi > lo) iv.emplace_back(lo, hi);
    }
    std::sort(iv.begin(), iv.end());
    double cur_lo = 0.0, cur_hi = -1.0;
    for (const auto& [lo, hi] : iv) {
      if (lo > cur_hi) {
        if (cur_hi > cur_lo) total += cur_hi - cur_lo;
        cur_lo = lo;
        cur_hi = hi;
      } else {
        cur_hi = std::max(cur_hi, hi);
      }
    }
    if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  }
  return total;
}

struct Extractor {
  const AtomicMeasure& mu;
  std::vector<Point> pts;
  std::vector<double> w;
  double rho = 0.0;
  PointGrid cover_grid;

  explicit Extractor(const AtomicMeasure& m) : mu(m), pts(positions(m)) {
    for (const Atom& a : m) w.push_back(a.w);
    rho = 0.5 * median_nn_distance(pts);
    if (rho == 0.0) rho = m.quant();
    cover_grid = PointGrid(pts, std::max(grid_cell_for(pts, rho), rho));
  }

  ConeCurve run(const ConeDag& dag, const std::vector<char>& active) const {
    ConeCurve out;
    out.rho = rho;
    out.atoms = dag.best_chain(w, active, out.captured_mass);
    for (std::size_t i : out.atoms) out.curve.vertices.push_back(pts[i]);
    out.curve_length = out.curve.length();
    out.captured_length = out.atoms.size() < 2 ? 0.0 : covered_length(out.curve.vertices, pts, cover_grid, rho);
    return out;
  }
};

}  // namespace

ConeCurve cone_curve_extract(const AtomicMeasure& mu, const ConeSpec& cone, double step_min, double step_max) {
  if (!(step_min > 0) || step_max < step_min) throw InvalidArgument("cone_curve_extract: need 0 < step_min <= step_max");
  if (mu.empty()) return {};
  if (cone.e.size() != mu.n()) throw InvalidArgument("cone dimension mismatch");
  const Extractor ex(mu);
  const ConeDag dag(ex.pts, cone, step_min, step_max);
  return ex.run(dag, std::vector<char>(mu.size(), 1));
}

CertificateReport unrectifiability_certificate(const AtomicMeasure& mu, const std::vector<ConeSpec>& cones,
                                               double threshold, const CertificateParams& params) {
  if (!cones_cover(cones, mu.n())) throw InvalidArgument("cone net does not cover all directions");
  CertificateReport rep;
  rep.threshold = threshold;
  rep.witness.n = mu.n();
  if (mu.empty()) {
    rep.certified = true;
    return rep;
  }
  const Extractor ex(mu);
  rep.diameter = bounding_box(mu).diagonal();
  rep.step_min = params.step_min > 0 ? params.step_min : mu.quant();
  rep.step_max = params.step_max > 0 ? params.step_max
                 : mu.size() <= 2048   ? std::max(rep.diameter, rep.step_min)
                                       : 32.0 * ex.rho;
  const double total = mu.total_mass();
  rep.certified = true;
  for (const ConeSpec& c : cones) {
    const ConeDag dag(ex.pts, c, rep.step_min, rep.step_max);
    const ConeCurve cc = ex.run(dag, std::vector<char>(mu.size(), 1));
    const double frac = rep.diameter > 0 ? cc.captured_length / rep.diameter : 0.0;
    rep.fractions.push_back(frac);
    rep.mass_fractions.push_back(cc.captured_mass / total);
    if (frac >= threshold) {
      rep.certified = false;
      rep.witness.members.push_back({1.0, cc.curve});
    }
  }
  return rep;
}

BundleReport decomposability_bundle(const AtomicMeasure& mu, const std::vector<CurveFamily>& supplied,
                                    const std::vector<PolylineCurrent1>& currents,
                                    const std::vector<ConeSpec>& cones, const BundleParams& params) {
  BundleReport rep;
  const int n = mu.n();
  rep.radius = params.radius > 0 ? params.radius : default_radius(mu);
  rep.rank_tol = std::tan(params.angle_tol / 2);
  rep.dim_mass.assign(static_cast<std::size_t>(n) + 1, 0.0);
  rep.dim_count.assign(static_cast<std::size_t>(n) + 1, 0);
  if (mu.empty()) return rep;

  const std::vector<Point> pts = positions(mu);
  std::vector<std::vector<Point>> dirs(mu.size());
  auto current_f = [&] {
    double f = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) f += mu[i].w * from_vectors(n, dirs[i], rep.rank_tol).dim();
    return f;
  };

  const PointGrid grid(pts, grid_cell_for(pts, rep.radius));
  for (std::size_t k = 0; k < supplied.size(); ++k) {
    collect_family_directions(supplied[k], pts, grid, rep.radius, dirs);
    rep.f_history.emplace_back("family " + std::to_string(k), current_f());
  }
  for (std::size_t k = 0; k < currents.size(); ++k) {
    collect_family_directions(family_from_decomposition(smirnov_decompose(currents[k], mu.quant())), pts, grid,
                              rep.radius, dirs);
    rep.f_history.emplace_back("current " + std::to_string(k), current_f());
  }

  if (!cones.empty()) {
    const Extractor ex(mu);
    rep.rho = ex.rho;
    rep.step_min = params.step_min > 0 ? params.step_min : mu.quant();
    rep.step_max = params.step_max > 0 ? params.step_max : 8.0 * ex.rho;
    const double total = mu.total_mass();
    for (std::size_t k = 0; k < cones.size(); ++k) {
      const ConeSpec& c = cones[k];
      if (c.e.size() != n) throw InvalidArgument("cone dimension mismatch");
      ConeRoundLog log;
      log.cone = c;
      const ConeDag dag(pts, c, rep.step_min, rep.step_max);
      std::vector<char> active(mu.size(), 1);
      for (int round = 0; round < params.max_rounds; ++round) {
        const ConeCurve cc = ex.run(dag, active);
        if (cc.atoms.size() < 2 || cc.captured_mass < params.min_gain * total) break;
        if (cc.captured_length < params.min_density * cc.curve_length) break;
        const auto& ch = cc.atoms;
        for (std::size_t j = 0; j < ch.size(); ++j) {
          const Point& lo = pts[ch[j == 0 ? 0 : j - 1]];
          const Point& hi = pts[ch[j + 1 == ch.size() ? j : j + 1]];
          dirs[ch[j]].push_back((hi - lo).normalized());
          active[ch[j]] = 0;
        }
        ++log.accepted;
        log.captured_mass += cc.captured_mass;
        log.curves.push_back(cc.curve);
      }
      rep.f_history.emplace_back("cone " + std::to_string(k), current_f());
      rep.cones.push_back(std::move(log));
    }
  }

  rep.bundle.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    rep.bundle[i] = from_vectors(n, dirs[i], rep.rank_tol);
    rep.dim_mass[static_cast<std::size_t>(rep.bundle[i].dim())] += mu[i].w;
    ++rep.dim_count[static_cast<std::size_t>(rep.bundle[i].dim())];
  }
  return rep;
}

double verify_span_inclusion(const VectorAtomMeasure& t, const AtomicMeasure& mu, const Bundle& bundle,
                             double angle_tol) {
  if (bundle.size() != mu.size()) throw InvalidArgument("bundle keyed to a different measure");
  const RadonNikodym rn = radon_nikodym(t, mu);
  const double bound = std::sin(angle_tol);
  double pass = 0.0, total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    total += mu[i].w;
    if (rn.density[i].is_zero() || excess(span_of(rn.density[i]), bundle[i]) <= bound) pass += mu[i].w;
  }
  return total > 0 ? pass / total : 1.0;
}

}  // namespace gmk
