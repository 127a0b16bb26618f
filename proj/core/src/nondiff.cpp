#include "gmk/nondiff.hpp"

#include <algorithm>
#include <cmath>

#include "gmk/decomposition.hpp"
#include "gmk/errors.hpp"
#include "gmk/spatial.hpp"

namespace gmk {
namespace {

std::vector<Patch> build_patches(const AtomicMeasure& mu, const Bundle& bundle, double angle) {
  const double tol = std::sin(angle);
  std::vector<Patch> out;
  std::vector<char> taken(mu.size(), 0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (taken[i]) continue;
    Patch p;
    p.v = bundle[i];
    p.codim = mu.n() - p.v.dim();
    for (std::size_t j = i; j < mu.size(); ++j) {
      if (taken[j] || bundle[j].dim() != p.v.dim()) continue;
      if (j != i && d_gr(bundle[j], p.v) > tol) continue;
      taken[j] = 1;
      p.atoms.push_back(j);
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Max axis difference / Δ of f + s·b over the nodes of b's window grown by one node.
double local_lipschitz(const GridField& f, const GridField& b, double s) {
  const GridSpec& spec = f.spec();
  const Index3 off = spec.offset_of(b.spec());
  Index3 lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < spec.n; ++a) {
    lo[a] = std::max(0, off[a] - 1);
    hi[a] = std::min(spec.shape[a] - 1, off[a] + b.spec().shape[a]);
  }
  auto value = [&](const Index3& c) {
    double v = f.at(c);
    const Index3 l{c[0] - off[0], c[1] - off[1], c[2] - off[2]};
    if (b.spec().valid(l)) v += s * b.at(l);
    return v;
  };
  double m = 0.0;
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const Index3 c{i, j, k};
        const double v0 = value(c);
        for (int a = 0; a < spec.n; ++a) {
          Index3 d = c;
          ++d[a];
          if (d[a] > hi[a]) continue;
          m = std::max(m, std::abs(value(d) - v0));
        }
      }
  return m / spec.spacing;
}

}  // namespace

std::vector<Point> lattice_directions(int n) {
  std::vector<Point> out;
  const int kz = n == 3 ? 1 : 0;
  for (int nz = 1; nz <= n; ++nz)
    for (int k = -kz; k <= kz; ++k)
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) {
          const int c[3] = {i, j, k};
          int count = 0, first = 0;
          for (int a = 0; a < n; ++a)
            if (c[a] != 0) {
              if (count == 0) first = c[a];
              ++count;
            }
          if (count != nz || first < 0) continue;
          Point p(n);
          for (int a = 0; a < n; ++a) p[a] = c[a];
          out.push_back(p.normalized());
        }
  return out;
}

NondiffResult assemble_nondiff(const AtomicMeasure& mu, const Bundle& bundle, int rounds, const NondiffParams& params) {
  const int n = mu.n();
  if (n != 2 && n != 3) throw InvalidArgument("assemble_nondiff supports n = 2 or 3");
  if (bundle.size() != mu.size()) throw InvalidArgument("bundle size differs from measure");
  if (mu.empty()) throw InvalidArgument("assemble_nondiff needs atoms");
  if (rounds < 0) throw InvalidArgument("negative round count");

  const std::vector<Point> pts = positions(mu);
  const double nn = median_nn_distance(pts);
  NondiffResult res;
  res.spacing = params.spacing > 0.0 ? params.spacing : (nn > 0.0 ? nn / 16.0 : 1.0 / 256.0);
  const double h = res.spacing;
  res.sigmas = params.sigmas.empty() ? std::vector<double>{16.0 * h} : params.sigmas;
  if (params.directions.empty()) {
    for (int a = 0; a < n; ++a) res.directions.push_back(Point::Unit(n, a));
  } else {
    res.directions = params.directions;
  }
  const double max_sigma = *std::max_element(res.sigmas.begin(), res.sigmas.end());
  const double min_sigma = *std::min_element(res.sigmas.begin(), res.sigmas.end());
  const double eps = params.eps > 0.0 ? params.eps : 0.5 * min_sigma;
  const double r0 = params.r0 > 0.0 ? params.r0 : 0.25 * min_sigma;
  const double margin = params.margin > 0.0 ? params.margin : std::max(2.0 * r0, max_sigma) + 4.0 * h;
  const BoundingBox box = bounding_box(pts);
  res.f = GridField(GridSpec::covering(box.lo, box.hi, h, margin), 0.0);
  GridField& f = res.f;

  res.patches = build_patches(mu, bundle, params.patch_angle);
  int active = 0;
  for (Patch& p : res.patches)
    if (p.codim > 0) p.weight = std::ldexp(1.0, -active++);
  if (active > params.max_patches)
    throw ResolutionError("bundle too oscillatory: " + std::to_string(active) + " patches exceed the limit");
  const double lip_cap = params.lip_budget * (2.0 - std::ldexp(1.0, 1 - std::max(active, 1)));

  const std::vector<Point> lattice = lattice_directions(n);
  const std::size_t nd = res.directions.size();

  struct Placed {
    Point center;
    double rp;
    int sign;
  };
  std::vector<std::vector<Placed>> placed(res.patches.size());
  for (int round = 0; round < rounds; ++round) {
    for (std::size_t pi = 0; pi < res.patches.size(); ++pi) {
      const Patch& patch = res.patches[pi];
      if (patch.codim == 0) continue;
      const double sd = std::sqrt(static_cast<double>(patch.codim));

      AtomicMeasure sub(n, mu.quant());
      Bundle sub_bundle;
      for (std::size_t a : patch.atoms) {
        sub.add(mu[a].x, mu[a].w);
        sub_bundle.push_back(bundle[a]);
      }
      const NondiffCheck check = check_nondiff(f, sub, sub_bundle, res.directions, res.sigmas, params.tol);

      RoundLog log;
      log.patch = static_cast<int>(pi);
      log.round = round;
      std::vector<std::size_t> failing;
      for (std::size_t s = 0; s < patch.atoms.size(); ++s)
        if (!check.atom_pass[s]) {
          failing.push_back(s);
          log.target_mass += sub[s].w;
        }
      log.bound = log.target_mass / (4.0 * patch.codim);
      if (failing.empty()) {
        log.e = Point::Zero(n);
        res.rounds.push_back(std::move(log));
        continue;
      }

      // Complement directions: lattice directions within the patch angle of V⊥, else the snapped frame.
      std::vector<Point> cands;
      for (const Point& p : lattice)
        if (patch.v.project(p).norm() <= std::sin(params.patch_angle) + 1e-12) cands.push_back(p);
      if (cands.empty()) {
        const Eigen::MatrixXd frame = complement(patch.v).frame();
        for (int c = 0; c < frame.cols(); ++c) {
          std::size_t best = 0;
          for (std::size_t l = 1; l < lattice.size(); ++l)
            if (std::abs(lattice[l].dot(frame.col(c))) > std::abs(lattice[best].dot(frame.col(c)))) best = l;
          cands.push_back(lattice[best]);
        }
      }
      auto serves = [&](std::size_t s, const Point& e) {
        for (std::size_t j = 0; j < nd; ++j) {
          const QuotientRow& row = check.rows[s * nd + j];
          if (row.pass) continue;
          if (std::abs(row.v.dot(e)) >= dist(row.v, sub_bundle[s]) / sd - 1e-12) return true;
        }
        return false;
      };
      double best_score = -1.0;
      Point e;
      for (const Point& c : cands) {
        double score = 0.0;
        for (std::size_t s : failing) {
          int served = 0;
          for (std::size_t j = 0; j < nd; ++j) {
            const QuotientRow& row = check.rows[s * nd + j];
            if (!row.pass && std::abs(row.v.dot(c)) >= dist(row.v, sub_bundle[s]) / sd - 1e-12) ++served;
          }
          score += sub[s].w * served;
        }
        if (score > best_score * (1.0 + 1e-12)) {
          best_score = score;
          e = c;
        }
      }
      log.e = e;
      const Index3 step = lattice_step(e);
      const ConeSpec cone(e, params.cone_angle);

      std::vector<std::size_t> selected;
      for (std::size_t s : failing)
        if (serves(s, e)) {
          selected.push_back(s);
          log.selected_mass += sub[s].w;
        }

      std::vector<Point> sel_pts;
      for (std::size_t s : selected) sel_pts.push_back(sub[s].x);
      const PointGrid index(sel_pts, std::max(r0 / 4.0, h));
      std::vector<Point> patch_pts;
      for (std::size_t a : patch.atoms) patch_pts.push_back(mu[a].x);
      const PointGrid patch_index(patch_pts, std::max(r0 / 4.0, h));
      std::vector<char> covered(selected.size(), 0);
      std::vector<std::pair<Point, double>> supports;

      for (int level = 0; level < params.radius_levels; ++level) {
        const double r = std::ldexp(r0, -level);
        const double rp = 2.0 * r;
        if (r < 2.0 * h) break;
        int failures = 0;
        std::vector<char> tried(selected.size(), 0);
        while (failures < params.max_failures) {
          // Largest uncovered mass first among centres whose support misses earlier supports.
          double best_mass = 0.0;
          std::size_t best = selected.size();
          for (std::size_t c = 0; c < selected.size(); ++c) {
            if (covered[c] || tried[c]) continue;
            const Point& x = sel_pts[c];
            bool free = f.spec().contains(x - Point::Constant(n, rp)) && f.spec().contains(x + Point::Constant(n, rp));
            for (const auto& [y, ry] : supports)
              if ((x - y).norm() < rp + ry) {
                free = false;
                break;
              }
            if (!free) continue;
            double m = 0.0;
            index.within(x, r, [&](std::size_t q) {
              if (!covered[q]) m += sub[selected[q]].w;
            });
            if (m > best_mass * (1.0 + 1e-12)) {
              best_mass = m;
              best = c;
            }
          }
          if (best == selected.size()) break;
          tried[best] = 1;
          const Point center = sel_pts[best];
          std::vector<std::size_t> inside;
          for (std::size_t q : index.within(center, r))
            if (!covered[q]) inside.push_back(q);
          // K: every patch atom inside the support.
          std::vector<Point> kpts;
          for (std::size_t q : patch_index.within(center, rp)) kpts.push_back(patch_pts[q]);
          const double eps_prime = std::min(eps, params.c_cut * (rp - r));
          const Index3 lo = f.spec().nearest(center - Point::Constant(n, rp));
          const Index3 hi = f.spec().nearest(center + Point::Constant(n, rp));
          const GridSpec window = f.spec().sub(lo, hi);
          PerturbationResult pg;
          try {
            pg = perturbation_g(kpts, cone, eps_prime, window);
          } catch (const ResolutionError&) {
            ++failures;
            ++log.rejected;
            continue;
          }
          const GridField bump = localized_bump(pg.g, center, r, rp, eps_prime);
          // Overlapping an earlier bump of this patch: reuse its sign.
          int sign = 0;
          for (const Placed& q : placed[pi])
            if ((q.center - center).norm() < q.rp + rp) {
              sign = q.sign;
              break;
            }
          if (sign == 0) {
            // Derivative of the regularized f: forward quotient at the coarsest σ.
            const Index3 y = f.spec().nearest(center);
            const double plen = std::sqrt(static_cast<double>(step[0] * step[0] + step[1] * step[1] + step[2] * step[2]));
            const int m = std::max(1, static_cast<int>(std::lround(max_sigma / (plen * h))));
            const double slope = forward_slope(f, y, {m * step[0], m * step[1], m * step[2]});
            sign = (std::isnan(slope) || slope <= 0.0) ? 1 : -1;
          }
          const double amp = 0.5 * patch.weight * sign;
          if (local_lipschitz(f, bump, amp) > lip_cap) {
            ++failures;
            ++log.rejected;
            continue;
          }
          f.add(bump, amp);
          supports.emplace_back(center, rp);
          placed[pi].push_back({center, rp, sign});
          BallLog ball;
          ball.center = center;
          ball.r = r;
          ball.r_prime = rp;
          ball.eps = eps_prime;
          ball.delta = pg.delta;
          ball.sign = sign;
          for (std::size_t q : inside) {
            covered[q] = 1;
            ball.atoms.push_back(patch.atoms[selected[q]]);
            log.covered_mass += sub[selected[q]].w;
          }
          log.balls.push_back(std::move(ball));
        }
      }
      res.rounds.push_back(std::move(log));
    }
  }
  res.lipschitz = f.lipschitz();
  return res;
}

}  // namespace gmk
