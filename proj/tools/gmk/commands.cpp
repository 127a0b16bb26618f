#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "gmk/currents.hpp"
#include "gmk/decomposition.hpp"
#include "gmk/errors.hpp"
#include "gmk/generators.hpp"
#include "gmk/nondiff.hpp"
#include "gmk/quotients.hpp"
#include "gmk/spatial.hpp"
#include "gmk/version.hpp"
#include "svg.hpp"

namespace gmk::cli {
namespace {

namespace fs = std::filesystem;

void emit(const RunConfig& cfg, const std::string& name, const std::string& text) {
  fs::create_directories(cfg.output);
  write_text((fs::path(cfg.output) / name).string(), text);
}

Json report_head(const RunConfig& cfg) {
  return {{"command", cfg.command}, {"version", kVersion}, {"config", cfg.params}};
}

void finish(const RunConfig& cfg, Json report, const std::vector<std::pair<std::string, bool>>& checks) {
  Json a = Json::array();
  bool all = true;
  for (const auto& [name, ok] : checks) {
    a.push_back({{"name", name}, {"pass", ok}});
    all = all && ok;
    if (!ok) std::cerr << "assertion failed: " << name << "\n";
  }
  report["assertions"] = std::move(a);
  report["pass"] = all;
  if (cfg.wants("json")) emit(cfg, "report.json", dump(report));
}

bool all_pass(const std::vector<std::pair<std::string, bool>>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

std::string input_path(const RunConfig& cfg) {
  const std::string in = get_string(cfg.params, "input");
  if (in.empty()) throw ParseError(cfg.command + " needs --input");
  return in;
}

AtomicMeasure load_measure(const std::string& path) { return measure_from_json(read_json(path)); }

std::string frame_text(const Subspace& s) {
  std::ostringstream out;
  for (Eigen::Index c = 0; c < s.frame().cols(); ++c) {
    if (c) out << ";";
    for (Eigen::Index r = 0; r < s.frame().rows(); ++r) out << (r ? " " : "") << format_double(s.frame()(r, c));
  }
  return out.str();
}

std::string point_text(const Point& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? " " : "") + format_double(x[i]);
  return s;
}

std::vector<ConeSpec> load_cones(const Json& spec, int n) {
  if (spec.is_string()) {
    if (spec.get<std::string>() != "default") throw ParseError("cones must be \"default\" or a list");
    return default_cone_net(n);
  }
  if (!spec.is_array()) throw ParseError("cones must be \"default\" or a list");
  std::vector<ConeSpec> out;
  for (const Json& c : spec)
    out.emplace_back(point_from_json(c.at("e"), n).normalized(), get_degrees(c, "alpha_deg"));
  return out;
}

Json cone_json(const ConeSpec& c) {
  return {{"e", point_to_json(c.e)}, {"alpha_deg", c.alpha * 180.0 / std::numbers::pi}};
}

Json certificate_json(const CertificateReport& r) {
  return {{"certified", r.certified}, {"threshold", r.threshold}, {"diameter", r.diameter},
          {"step_min", r.step_min}, {"step_max", r.step_max}, {"fractions", r.fractions},
          {"mass_fractions", r.mass_fractions}, {"witness", to_json(r.witness)}};
}

void draw_cone_fans(Svg& svg, const BoundingBox& box, const std::vector<ConeSpec>& cones) {
  const double span = std::max(box.hi[0] - box.lo[0], box.hi[1] - box.lo[1]);
  const double len = 0.06 * (span > 0 ? span : 1.0);
  Point anchor = box.lo;
  for (const ConeSpec& c : cones) {
    const double a = std::atan2(c.e[1], c.e[0]);
    for (double s : {-c.alpha, 0.0, c.alpha}) {
      Point tip = anchor;
      tip[0] += len * std::cos(a + s);
      tip[1] += len * std::sin(a + s);
      svg.line(anchor, tip, "#7f7f7f", s == 0.0 ? 1.2 : 0.6, 0.8);
    }
  }
}

GridSpec grid_for(const AtomicMeasure& mu, double spacing, const std::vector<double>& sigmas) {
  const std::vector<Point> pts = positions(mu);
  const double nn = median_nn_distance(pts);
  const double h = spacing > 0 ? spacing : (nn > 0 ? nn / 16.0 : 1.0 / 256.0);
  const double smax = sigmas.empty() ? 16.0 * h : *std::max_element(sigmas.begin(), sigmas.end());
  const BoundingBox box = bounding_box(pts);
  return GridSpec::covering(box.lo, box.hi, h, smax + 4.0 * h);
}

FormField load_form(const Json& f, int n) {
  const std::string kind = get_string(f, "kind");
  if (kind == "constant") {
    return constant_form(KCovector::scalar(n, f.contains("value") ? get_double(f, "value") : 1.0));
  }
  if (kind == "coordinate") {
    const int a = get_int(f, "axis");
    if (a < 0 || a >= n) throw ParseError("form axis out of range");
    return scalar_form(n, [a](const Point& x) { return x[a]; }, 1.0, 1.0);
  }
  if (kind == "distance") {
    const Point p = point_from_json(f.at("point"), n);
    return scalar_form(n, [p](const Point& x) { return (x - p).norm(); }, 1.0, 1.0);
  }
  if (kind == "wavy") {
    return scalar_form(n, [](const Point& x) { return std::sin(3.0 * x[0]) * x[1]; }, 4.0, 1.0);
  }
  if (kind == "one_form") {
    const std::vector<double> c = get_doubles(f, "coeffs");
    if (static_cast<int>(c.size()) != n) throw ParseError("one_form needs n coefficients");
    KCovector k(n, 1);
    for (int i = 0; i < n; ++i) k[i] = c[i];
    return constant_form(k);
  }
  if (kind == "quadratic_one_form") {
    if (n < 2) throw ParseError("quadratic_one_form needs n >= 2");
    return {n, 1, [n](const Point& x) {
              KCovector k(n, 1);
              k[0] = x[1] * x[1];
              k[1] = x[0];
              return k;
            },
            2.0, 1.0};
  }
  throw ParseError("unknown form kind " + kind);
}

PointMap load_map(const Json& m, int n) {
  const std::string kind = get_string(m, "kind");
  if (kind == "affine") {
    const std::vector<double> a = get_doubles(m, "matrix");
    const std::vector<double> b = get_doubles(m, "offset");
    if (static_cast<int>(a.size()) != n * n || static_cast<int>(b.size()) != n)
      throw ParseError("affine map needs an n x n matrix and n offsets");
    Eigen::MatrixXd mat(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mat(i, j) = a[i * n + j];
    const Point off = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
    return [mat, off](const Point& x) -> Point { return mat * x + off; };
  }
  if (kind == "twist") {
    return [](const Point& x) -> Point {
      Point y = x;
      y[0] = x[0] + 0.25 * std::sin(x[1]);
      return y;
    };
  }
  throw ParseError("unknown map kind " + kind);
}

Json default_checks(int k, int n) {
  Json far = Json::array();
  for (int i = 0; i < n; ++i) far.push_back(i == 0 ? 2.0 : 0.0);
  if (k == 1)
    return Json::array({
        {{"formula", "boundary"}, {"form", {{"kind", "coordinate"}, {"axis", 0}}}, {"delta", 0.1}, {"step", 1e-4},
         {"tol", 1e-10}},
        {{"formula", "boundary"}, {"form", {{"kind", "distance"}, {"point", far}}}, {"delta", 1e-2}, {"step", 1e-4},
         {"tol", 1e-4}},
        {{"formula", "pushforward"}, {"map", {{"kind", "twist"}}}, {"form", {{"kind", "quadratic_one_form"}}},
         {"delta", 1e-2}, {"step", 1e-4}, {"tol", 1e-4}},
    });
  return Json::array({
      {{"formula", "boundary"}, {"form", {{"kind", "quadratic_one_form"}}}, {"delta", 0.05}, {"step", 1e-4},
       {"tol", 1e-6}},
      {{"formula", "interior"}, {"form", {{"kind", "constant"}, {"value", 2.5}}}, {"delta", 0.05}, {"step", 1e-4},
       {"tol", 1e-10}},
  });
}

}  // namespace

bool run_generate(const RunConfig& cfg) {
  const Json& p = cfg.params;
  const std::string kind = get_string(p, "kind");
  Json report = report_head(cfg);
  AtomicMeasure mu;
  std::optional<PolylineCurve> curve;
  if (kind == "cantor_dust") {
    mu = cantor_dust(get_int(p, "depth"), get_int(p, "n"));
  } else if (kind == "sierpinski_carpet") {
    mu = sierpinski_carpet(get_int(p, "depth"));
  } else if (kind == "grid_lebesgue") {
    const int m = get_int(p, "m");
    if (m < 1 || m > kMaxGrid) throw ResourceError("grid size outside [1, 512]");
    mu = grid_lebesgue(get_int(p, "n"), m);
  } else if (kind == "koch") {
    curve = koch_curve(get_int(p, "depth"));
  } else if (kind == "circle") {
    curve = circle_curve(get_int(p, "k"), get_double(p, "radius"), point_from_json(p.at("center"), 2));
  } else if (kind == "segment") {
    const Json& a = p.at("a");
    if (!a.is_array()) throw ParseError("segment endpoint must be an array");
    const int n = static_cast<int>(a.size());
    curve = segment_curve(point_from_json(a, n), point_from_json(p.at("b"), n));
  } else {
    throw ParseError("unknown generator " + kind);
  }
  if (curve) {
    const double delta = get_double(p, "delta") > 0 ? get_double(p, "delta") : default_delta(bounding_box(curve->vertices));
    mu = h1_measure(*curve, delta);
    const CurveFamily fam{curve->n(), {{1.0, *curve}}};
    report["segments"] = curve->segments();
    report["length"] = curve->length();
    report["delta"] = delta;
    if (cfg.wants("json")) {
      emit(cfg, "family.json", dump(to_json(fam)));
      emit(cfg, "current.json", dump(to_json(current_from_curve(*curve))));
    }
  }
  const double jitter = get_double(p, "jitter");
  if (jitter > 0.0) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(get_int(p, "seed")));
    std::normal_distribution<double> g(0.0, jitter);
    AtomicMeasure moved(mu.n(), mu.quant());
    for (const Atom& a : mu) {
      Point x = a.x;
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += g(rng);
      moved.add(x, a.w);
    }
    mu = std::move(moved);
  }
  report["kind"] = kind;
  report["atoms"] = mu.size();
  report["total_mass"] = mu.total_mass();
  if (cfg.wants("json")) emit(cfg, "measure.json", dump(to_json(mu)));
  if (cfg.wants("csv")) {
    std::ostringstream csv;
    csv << "atom,x,w\n";
    for (std::size_t i = 0; i < mu.size(); ++i) csv << i << "," << point_text(mu[i].x) << "," << format_double(mu[i].w) << "\n";
    emit(cfg, "atoms.csv", csv.str());
  }
  if (cfg.wants("svg") && mu.n() == 2) {
    Svg svg(bounding_box(mu));
    if (curve) svg.polyline(curve->vertices, "#1f77b4", 1.0);
    for (const Atom& a : mu) svg.circle(a.x, 1.5, "#333333");
    emit(cfg, "overlay.svg", svg.str());
  }
  finish(cfg, std::move(report), {});
  return true;
}

bool run_bundle(const RunConfig& cfg) {
  const Json& p = cfg.params;
  const AtomicMeasure mu = load_measure(input_path(cfg));
  const int n = mu.n();
  std::vector<CurveFamily> families;
  for (const std::string& f : get_strings(p, "families")) families.push_back(family_from_json(read_json(f)));
  std::vector<PolylineCurrent1> currents;
  for (const std::string& c : get_strings(p, "currents")) currents.push_back(current1_from_json(read_json(c)));
  const std::vector<ConeSpec> cones = load_cones(p.at("cones"), n);
  BundleParams bp;
  bp.radius = get_double(p, "radius");
  bp.step_min = get_double(p, "step_min");
  bp.step_max = get_double(p, "step_max");
  bp.min_gain = get_double(p, "min_gain");
  bp.min_density = get_double(p, "min_density");
  bp.angle_tol = get_degrees(p, "angle_tol_deg");
  const BundleReport br = decomposability_bundle(mu, families, currents, cones, bp);

  Json report = report_head(cfg);
  const double total = mu.total_mass();
  report["atoms"] = mu.size();
  report["total_mass"] = total;
  Json hist = Json::array();
  for (int d = 0; d <= n; ++d)
    hist.push_back({{"dim", d}, {"count", br.dim_count[d]}, {"mass_fraction", total > 0 ? br.dim_mass[d] / total : 0.0}});
  report["dim_histogram"] = std::move(hist);
  Json fh = Json::array();
  for (const auto& [name, value] : br.f_history) fh.push_back({{"family", name}, {"F", value}});
  report["f_history"] = std::move(fh);
  report["F"] = br.f_history.empty() ? 0.0 : br.f_history.back().second;
  Json cj = Json::array();
  for (const ConeRoundLog& c : br.cones) {
    CurveFamily fam{n, {}};
    for (const PolylineCurve& curve : c.curves) fam.members.push_back({1.0, curve});
    Json e = cone_json(c.cone);
    e["accepted"] = c.accepted;
    e["captured_mass"] = c.captured_mass;
    e["mass_fraction"] = total > 0 ? c.captured_mass / total : 0.0;
    e["witness"] = to_json(fam);
    cj.push_back(std::move(e));
  }
  report["cones"] = std::move(cj);
  report["resolution"] = {{"radius", br.radius}, {"step_min", br.step_min}, {"step_max", br.step_max},
                          {"rho", br.rho}, {"rank_tol", br.rank_tol}};
  if (get_bool(p, "certificate"))
    report["certificate"] = certificate_json(unrectifiability_certificate(mu, cones, get_double(p, "certificate_threshold")));

  std::vector<std::pair<std::string, bool>> checks;
  const int expect = get_int(p, "expect_dim");
  if (expect >= 0) {
    const double frac = expect <= n && total > 0 ? br.dim_mass[expect] / total : 0.0;
    checks.emplace_back("dim " + std::to_string(expect) + " mass fraction", frac >= get_double(p, "expect_fraction"));
  }

  if (cfg.wants("json")) emit(cfg, "bundle.json", dump(to_json(br.bundle)));
  if (cfg.wants("csv")) {
    std::ostringstream csv;
    csv << "atom,dim,frame\n";
    for (std::size_t i = 0; i < br.bundle.size(); ++i)
      csv << i << "," << br.bundle[i].dim() << "," << frame_text(br.bundle[i]) << "\n";
    emit(cfg, "bundle.csv", csv.str());
  }
  if (cfg.wants("svg") && n == 2) {
    const BoundingBox box = bounding_box(mu);
    Svg svg(box);
    for (const ConeRoundLog& c : br.cones)
      for (const PolylineCurve& curve : c.curves) svg.polyline(curve.vertices, "#bbbbbb", 0.8);
    for (std::size_t i = 0; i < mu.size(); ++i) svg.circle(mu[i].x, 2.0, dim_color(br.bundle[i].dim()));
    draw_cone_fans(svg, box, cones);
    emit(cfg, "overlay.svg", svg.str());
  }
  finish(cfg, std::move(report), checks);
  return all_pass(checks);
}

bool run_decompose(const RunConfig& cfg) {
  const Json& p = cfg.params;
  const PolylineCurrent1 t = current1_from_json(read_json(input_path(cfg)));
  const Decomposition d = smirnov_decompose(t, get_double(p, "quant"));
  const double residual = mass_residual(d, t);
  const double rec = reconstruction_error(d);
  int loops = 0, paths = 0;
  bool closed = true;
  Json pieces = Json::array();
  for (std::size_t i = 0; i < d.pieces.size(); ++i) {
    const DecompositionPiece& pc = d.pieces[i];
    (pc.loop ? loops : paths)++;
    if (pc.loop) closed = closed && (pc.curve.vertices.front() - pc.curve.vertices.back()).norm() == 0.0;
    Json vs = Json::array();
    for (const Point& v : pc.curve.vertices) vs.push_back(point_to_json(v));
    pieces.push_back({{"index", i}, {"loop", pc.loop}, {"weight", pc.weight}, {"length", pc.curve.length()},
                      {"vertices", std::move(vs)}});
  }
  Json report = report_head(cfg);
  report["mass"] = mass(t);
  report["boundary_mass"] = boundary(t).total_variation();
  report["pieces"] = d.pieces.size();
  report["loops"] = loops;
  report["paths"] = paths;
  report["mass_residual"] = residual;
  report["reconstruction_error"] = rec;
  report["decomposition"] = std::move(pieces);

  std::vector<std::pair<std::string, bool>> checks{
      {"mass additivity", std::abs(residual) <= get_double(p, "mass_tol")},
      {"edge reconstruction", rec <= get_double(p, "reconstruction_tol")},
      {"loops are closed", closed}};
  if (get_int(p, "expect_loops") >= 0) checks.emplace_back("loop count", loops == get_int(p, "expect_loops"));
  if (get_int(p, "expect_paths") >= 0) checks.emplace_back("path count", paths == get_int(p, "expect_paths"));

  if (cfg.wants("json")) emit(cfg, "family.json", dump(to_json(family_from_decomposition(d))));
  if (cfg.wants("csv")) {
    std::ostringstream csv;
    csv << "piece,loop,weight,length,vertices\n";
    for (std::size_t i = 0; i < d.pieces.size(); ++i)
      csv << i << "," << (d.pieces[i].loop ? 1 : 0) << "," << format_double(d.pieces[i].weight) << ","
          << format_double(d.pieces[i].curve.length()) << "," << d.pieces[i].curve.vertices.size() << "\n";
    emit(cfg, "pieces.csv", csv.str());
  }
  if (cfg.wants("svg") && t.n == 2 && !d.graph.nodes.empty()) {
    Svg svg(bounding_box(d.graph.nodes));
    for (const DecompositionPiece& pc : d.pieces) svg.polyline(pc.curve.vertices, pc.loop ? "#1f77b4" : "#d62728", 1.2);
    emit(cfg, "overlay.svg", svg.str());
  }
  finish(cfg, std::move(report), checks);
  return all_pass(checks);
}

bool run_conecurve(const RunConfig& cfg) {
  const Json& p = cfg.params;
  const AtomicMeasure mu = load_measure(input_path(cfg));
  const int n = mu.n();
  const std::vector<Point> es = get_points(Json{{"e", p.at("e").empty() ? Json::array() : Json::array({p.at("e")})}}, "e", n);
  const Point e = es.empty() ? Point(Point::Unit(n, 0)) : Point(es.front().normalized());
  const ConeSpec cone(e, get_degrees(p, "alpha_deg"));
  const double diam = bounding_box(mu).diagonal();
  const double step_min = get_double(p, "step_min") > 0 ? get_double(p, "step_min") : mu.quant();
  const double step_max = get_double(p, "step_max") > 0 ? get_double(p, "step_max") : std::max(diam, step_min);
  const ConeCurve cc = cone_curve_extract(mu, cone, step_min, step_max);

  bool in_cone = true;
  const auto& vs = cc.curve.vertices;
  for (std::size_t j = 0; j + 1 < vs.size(); ++j) {
    const Point d = vs[j + 1] - vs[j];
    in_cone = in_cone && d.dot(cone.e) >= std::cos(cone.alpha) * d.norm() - 1e-12 * d.norm();
  }
  Json report = report_head(cfg);
  report["cone"] = cone_json(cone);
  report["step_min"] = step_min;
  report["step_max"] = step_max;
  report["atoms_captured"] = cc.atoms.size();
  report["captured_mass"] = cc.captured_mass;
  report["mass_fraction"] = mu.total_mass() > 0 ? cc.captured_mass / mu.total_mass() : 0.0;
  report["captured_length"] = cc.captured_length;
  report["curve_length"] = cc.curve_length;
  report["rho"] = cc.rho;
  if (get_bool(p, "certificate"))
    report["certificate"] =
        certificate_json(unrectifiability_certificate(mu, default_cone_net(n), get_double(p, "certificate_threshold")));
  const std::vector<std::pair<std::string, bool>> checks{{"consecutive vertices inside the cone", in_cone}};

  if (cfg.wants("json")) {
    CurveFamily fam{n, {}};
    if (vs.size() >= 2) fam.members.push_back({1.0, cc.curve});
    emit(cfg, "curve.json", dump(to_json(fam)));
  }
  if (cfg.wants("csv")) {
    std::ostringstream csv;
    csv << "order,atom,x,w\n";
    for (std::size_t j = 0; j < cc.atoms.size(); ++j)
      csv << j << "," << cc.atoms[j] << "," << point_text(mu[cc.atoms[j]].x) << "," << format_double(mu[cc.atoms[j]].w) << "\n";
    emit(cfg, "curve.csv", csv.str());
  }
  if (cfg.wants("svg") && n == 2) {
    const BoundingBox box = bounding_box(mu);
    Svg svg(box);
    for (const Atom& a : mu) svg.circle(a.x, 1.5, "#999999");
    if (vs.size() >= 2) svg.polyline(vs, "#d62728", 1.5);
    draw_cone_fans(svg, box, {cone});
    emit(cfg, "overlay.svg", svg.str());
  }
  finish(cfg, std::move(report), checks);
  return all_pass(checks);
}

bool run_nondiff(const RunConfig& cfg) {
  const Json& p = cfg.params;
  const AtomicMeasure mu = load_measure(input_path(cfg));
  const int n = mu.n();
  Bundle bundle;
  const std::string bpath = get_string(p, "bundle");
  if (!bpath.empty()) {
    bundle = bundle_from_json(read_json(bpath), n);
    if (bundle.size() != mu.size()) throw ParseError("bundle length differs from the measure");
  } else {
    std::vector<CurveFamily> families;
    for (const std::string& f : get_strings(p, "families")) families.push_back(family_from_json(read_json(f)));
    bundle = decomposability_bundle(mu, families, {}, default_cone_net(n)).bundle;
  }
  NondiffParams np;
  np.spacing = get_double(p, "spacing");
  np.margin = get_double(p, "margin");
  np.patch_angle = get_degrees(p, "patch_angle_deg");
  np.cone_angle = get_degrees(p, "cone_angle_deg");
  np.eps = get_double(p, "eps");
  np.c_cut = get_double(p, "c_cut");
  np.r0 = get_double(p, "r0");
  np.radius_levels = get_int(p, "radius_levels");
  np.max_failures = get_int(p, "max_failures");
  np.lip_budget = get_double(p, "lip_budget");
  np.max_patches = get_int(p, "max_patches");
  for (const Point& v : get_points(p, "directions", n)) np.directions.push_back(v.normalized());
  np.sigmas = get_doubles(p, "sigmas");
  np.tol = get_double(p, "tol");
  const NondiffResult res = assemble_nondiff(mu, bundle, get_int(p, "rounds"), np);
  const NondiffCheck chk = check_nondiff(res.f, mu, bundle, res.directions, res.sigmas, np.tol);

  Json report = report_head(cfg);
  report["lipschitz"] = res.lipschitz;
  report["spacing"] = res.spacing;
  Json shape = Json::array();
  for (int a = 0; a < n; ++a) shape.push_back(res.f.spec().shape[a]);
  report["grid_shape"] = std::move(shape);
  Json dirs = Json::array();
  for (const Point& v : res.directions) dirs.push_back(point_to_json(v));
  report["directions"] = std::move(dirs);
  report["sigmas"] = res.sigmas;
  Json patches = Json::array();
  for (const Patch& pt : res.patches)
    patches.push_back({{"codim", pt.codim}, {"weight", pt.weight}, {"atoms", pt.atoms.size()}, {"frame", frame_text(pt.v)}});
  report["patches"] = std::move(patches);
  Json rounds = Json::array();
  bool covered = true;
  for (const RoundLog& r : res.rounds) {
    covered = covered && r.covered_mass >= r.bound;
    Json balls = Json::array();
    for (const BallLog& b : r.balls)
      balls.push_back({{"center", point_to_json(b.center)}, {"r", b.r}, {"r_prime", b.r_prime}, {"eps", b.eps},
                       {"delta", b.delta}, {"sign", b.sign}, {"atoms", b.atoms}});
    rounds.push_back({{"patch", r.patch}, {"round", r.round}, {"e", point_to_json(r.e)}, {"target_mass", r.target_mass},
                      {"selected_mass", r.selected_mass}, {"covered_mass", r.covered_mass}, {"bound", r.bound},
                      {"rejected", r.rejected}, {"balls", std::move(balls)}});
  }
  report["rounds"] = std::move(rounds);
  report["pass_fraction"] = chk.pass_fraction;
  report["direction_fraction"] = chk.direction_fraction;

  const std::vector<std::pair<std::string, bool>> checks{
      {"Lipschitz bound", res.lipschitz <= get_double(p, "lip_max")},
      {"covered mass per round", covered},
      {"pass fraction", chk.pass_fraction >= get_double(p, "min_pass")}};

  if (cfg.wants("json")) {
    const std::string gf = get_string(p, "grid_format");
    if (gf == "json") {
      emit(cfg, "f.json", dump(to_json(res.f)));
    } else if (gf == "binary") {
      fs::create_directories(cfg.output);
      write_grid_binary((fs::path(cfg.output) / "f.bin").string(), res.f);
    } else {
      throw ParseError("grid_format must be json or binary");
    }
  }
  if (cfg.wants("csv")) emit(cfg, "quotients.csv", quotient_csv(chk.rows));
  if (cfg.wants("svg") && n == 2) {
    Svg svg(bounding_box(mu));
    for (std::size_t i = 0; i < mu.size(); ++i) svg.circle(mu[i].x, 2.0, chk.atom_pass[i] ? "#2ca02c" : "#d62728");
    emit(cfg, "overlay.svg", svg.str());
  }
  finish(cfg, std::move(report), checks);
  return all_pass(checks);
}

bool run_difftest(const RunConfig& cfg) {
  const Json& p = cfg.params;
  const std::string mpath = get_string(p, "measure");
  if (mpath.empty()) throw ParseError("difftest needs a \"measure\" setting");
  const AtomicMeasure mu = load_measure(mpath);
  const int n = mu.n();
  Bundle bundle(mu.size(), Subspace::zero(n));
  const std::string bpath = get_string(p, "bundle");
  if (!bpath.empty()) {
    bundle = bundle_from_json(read_json(bpath), n);
    if (bundle.size() != mu.size()) throw ParseError("bundle length differs from the measure");
  }
  const std::vector<double> sig = get_doubles(p, "sigmas");
  GridField f;
  const std::string in = get_string(p, "input");
  if (!in.empty()) {
    f = in.size() > 5 && in.substr(in.size() - 5) == ".json" ? grid_from_json(read_json(in)) : read_grid_binary(in);
    if (f.n() != n) throw ParseError("grid dimension differs from the measure");
  } else {
    const std::string fn = get_string(p, "function");
    const std::vector<double> c = get_doubles(p, "coeffs");
    Point a = Point::Zero(n);
    if (!c.empty()) {
      if (static_cast<int>(c.size()) != n) throw ParseError("coeffs needs n entries");
      for (int i = 0; i < n; ++i) a[i] = c[i];
    }
    std::function<double(const Point&)> g;
    if (fn == "zero") g = [](const Point&) { return 0.0; };
    else if (fn == "linear") g = [a](const Point& x) { return a.dot(x); };
    else if (fn == "abs") g = [a](const Point& x) { return std::abs(a.dot(x)); };
    else if (fn == "norm") g = [a](const Point& x) { return (x - a).norm(); };
    else throw ParseError("unknown function " + fn);
    f = GridField::sample(grid_for(mu, get_double(p, "spacing"), sig), g);
  }
  std::vector<Point> dirs;
  for (const Point& v : get_points(p, "directions", n)) dirs.push_back(v.normalized());
  if (dirs.empty())
    for (int i = 0; i < n; ++i) dirs.push_back(Point::Unit(n, i));
  const std::vector<double> sigmas = sig.empty() ? std::vector<double>{16.0 * f.spacing()} : sig;
  const NondiffCheck chk = check_nondiff(f, mu, bundle, dirs, sigmas, get_double(p, "tol"));
  double umax = 0.0;
  std::size_t evaluated = 0;
  for (const QuotientRow& r : chk.rows)
    if (!std::isnan(r.u)) {
      umax = std::max(umax, r.u);
      ++evaluated;
    }
  Json report = report_head(cfg);
  report["rows"] = chk.rows.size();
  report["evaluated"] = evaluated;
  report["max_u"] = umax;
  report["pass_fraction"] = chk.pass_fraction;
  report["direction_fraction"] = chk.direction_fraction;
  std::vector<std::pair<std::string, bool>> checks;
  if (get_double(p, "expect_u_max") >= 0) checks.emplace_back("max U", umax <= get_double(p, "expect_u_max"));
  if (get_double(p, "expect_pass_min") >= 0)
    checks.emplace_back("pass fraction", chk.pass_fraction >= get_double(p, "expect_pass_min"));
  if (cfg.wants("csv")) emit(cfg, "quotients.csv", quotient_csv(chk.rows));
  if (cfg.wants("svg") && n == 2) {
    Svg svg(bounding_box(mu));
    for (std::size_t i = 0; i < mu.size(); ++i) svg.circle(mu[i].x, 2.0, chk.atom_pass[i] ? "#2ca02c" : "#d62728");
    emit(cfg, "overlay.svg", svg.str());
  }
  finish(cfg, std::move(report), checks);
  return all_pass(checks);
}

bool run_verify_currents(const RunConfig& cfg) {
  const Json& p = cfg.params;
  const Json cur = read_json(input_path(cfg));
  const int k = current_degree(cur);
  std::optional<PolylineCurrent1> t1;
  std::optional<TriangleMeshCurrent2> t2;
  int n = 0;
  if (k == 1) {
    t1 = current1_from_json(cur);
    n = t1->n;
  } else {
    t2 = current2_from_json(cur);
    n = t2->n;
  }
  const Json checks_cfg = p.at("checks").empty() ? default_checks(k, n) : p.at("checks");
  if (!checks_cfg.is_array()) throw ParseError("checks must be an array");

  Json report = report_head(cfg);
  report["k"] = k;
  report["mass"] = k == 1 ? mass(*t1) : mass(*t2);
  report["boundary_mass"] = k == 1 ? boundary(*t1).total_variation() : mass(boundary2(*t2));
  report["resolved_checks"] = checks_cfg;
  Json results = Json::array();
  std::vector<std::pair<std::string, bool>> checks;
  std::ostringstream csv;
  csv << "check,formula,residual,tol,pass\n";
  for (std::size_t i = 0; i < checks_cfg.size(); ++i) {
    const Json& c = checks_cfg[i];
    const std::string formula = get_string(c, "formula");
    const FormField form = load_form(c.at("form"), n);
    const double delta = get_double(c, "delta"), step = get_double(c, "step"), tol = get_double(c, "tol");
    double residual = 0.0;
    if (formula == "boundary") {
      residual = k == 1 ? verify_boundary_formula(*t1, form, delta, step) : verify_boundary_formula(*t2, form, delta, step);
    } else if (formula == "interior") {
      if (k != 2) throw ParseError("interior check needs a 2-current");
      residual = verify_interior_boundary(*t2, form, delta, step);
    } else if (formula == "pushforward") {
      if (k != 1) throw ParseError("pushforward check needs a 1-current");
      residual = verify_pushforward_formula(*t1, load_map(c.at("map"), n), form, delta, step);
    } else {
      throw ParseError("unknown formula " + formula);
    }
    const bool ok = residual <= tol;
    results.push_back({{"formula", formula}, {"residual", residual}, {"tol", tol}, {"pass", ok}});
    checks.emplace_back(formula + " #" + std::to_string(i), ok);
    csv << i << "," << formula << "," << format_double(residual) << "," << format_double(tol) << "," << (ok ? 1 : 0) << "\n";
  }
  report["results"] = std::move(results);
  if (cfg.wants("csv")) emit(cfg, "checks.csv", csv.str());
  if (cfg.wants("svg") && n == 2) {
    std::vector<Point> pts;
    if (k == 1)
      for (const Piece1& pc : t1->pieces) pts.insert(pts.end(), pc.vertices.begin(), pc.vertices.end());
    else
      for (const Triangle& tr : t2->triangles) pts.insert(pts.end(), tr.v.begin(), tr.v.end());
    if (!pts.empty()) {
      Svg svg(bounding_box(pts));
      if (k == 1)
        for (const Piece1& pc : t1->pieces) svg.polyline(pc.vertices, "#1f77b4", 1.0);
      else
        for (const Triangle& tr : t2->triangles) svg.polyline({tr.v[0], tr.v[1], tr.v[2], tr.v[0]}, "#1f77b4", 0.6);
      emit(cfg, "overlay.svg", svg.str());
    }
  }
  finish(cfg, std::move(report), checks);
  return all_pass(checks);
}

}  // namespace gmk::cli
