#include "gmk/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gmk/errors.hpp"

namespace gmk {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding \"") + key + "\"");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string(what) + " must be finite");
  return v;
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
  return j;
}

int dimension(const Json& j) {
  const int n = integer(field(j, "n"), "n");
  if (n < 1 || n > 16) throw ParseError("n out of range");
  return n;
}

std::vector<Point> vertices(const Json& j, int n) {
  std::vector<Point> out;
  for (const Json& v : array(j, "vertices")) out.push_back(point_from_json(v, n));
  return out;
}

Json vertices_json(const std::vector<Point>& vs) {
  Json a = Json::array();
  for (const Point& v : vs) a.push_back(point_to_json(v));
  return a;
}

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("truncated grid file");
  return v;
}

}  // namespace

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path);
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Json point_to_json(const Point& x) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

Point point_from_json(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ParseError("point must be an array of " + std::to_string(n) + " numbers");
  Point x(n);
  for (int i = 0; i < n; ++i) x[i] = number(j[i], "coordinate");
  return x;
}

Json to_json(const AtomicMeasure& mu) {
  Json atoms = Json::array();
  for (const Atom& a : mu) atoms.push_back({{"x", point_to_json(a.x)}, {"w", a.w}});
  return {{"n", mu.n()}, {"quant", mu.quant()}, {"atoms", std::move(atoms)}};
}

AtomicMeasure measure_from_json(const Json& j) {
  const int n = dimension(j);
  double quant = kDefaultQuant;
  if (j.contains("quant")) quant = number(j["quant"], "quant");
  if (!(quant > 0.0)) throw ParseError("quant must be positive");
  AtomicMeasure mu(n, quant);
  for (const Json& a : array(field(j, "atoms"), "atoms")) {
    const double w = number(field(a, "w"), "w");
    if (w < 0.0) throw ParseError("atom weights must be nonnegative");
    mu.add(point_from_json(field(a, "x"), n), w);
  }
  return mu;
}

Json to_json(const CurveFamily& family) {
  Json members = Json::array();
  for (const auto& m : family.members)
    members.push_back({{"dt", m.dt}, {"mult", m.curve.mult}, {"vertices", vertices_json(m.curve.vertices)}});
  return {{"n", family.n}, {"members", std::move(members)}};
}

CurveFamily family_from_json(const Json& j) {
  CurveFamily f;
  f.n = dimension(j);
  for (const Json& m : array(field(j, "members"), "members")) {
    CurveFamily::Member mem;
    mem.dt = m.contains("dt") ? number(m["dt"], "dt") : 1.0;
    mem.curve.mult = m.contains("mult") ? number(m["mult"], "mult") : 1.0;
    if (mem.dt < 0.0) throw ParseError("dt must be nonnegative");
    mem.curve.vertices = vertices(field(m, "vertices"), f.n);
    if (mem.curve.vertices.size() < 2) throw ParseError("a curve needs at least two vertices");
    f.members.push_back(std::move(mem));
  }
  return f;
}

Json to_json(const PolylineCurrent1& t) {
  Json pieces = Json::array();
  for (const Piece1& p : t.pieces) pieces.push_back({{"m", p.m}, {"vertices", vertices_json(p.vertices)}});
  return {{"n", t.n}, {"k", 1}, {"pieces", std::move(pieces)}};
}

Json to_json(const TriangleMeshCurrent2& t) {
  Json pieces = Json::array();
  for (const Triangle& tr : t.triangles)
    pieces.push_back({{"m", tr.m}, {"vertices", vertices_json({tr.v[0], tr.v[1], tr.v[2]})}});
  return {{"n", t.n}, {"k", 2}, {"pieces", std::move(pieces)}};
}

int current_degree(const Json& j) {
  const int k = integer(field(j, "k"), "k");
  if (k != 1 && k != 2) throw ParseError("current degree must be 1 or 2");
  return k;
}

PolylineCurrent1 current1_from_json(const Json& j) {
  if (current_degree(j) != 1) throw ParseError("expected a 1-current");
  PolylineCurrent1 t;
  t.n = dimension(j);
  for (const Json& p : array(field(j, "pieces"), "pieces")) {
    Piece1 piece;
    piece.m = p.contains("m") ? number(p["m"], "m") : 1.0;
    piece.vertices = vertices(field(p, "vertices"), t.n);
    if (piece.vertices.size() < 2) throw ParseError("a piece needs at least two vertices");
    t.pieces.push_back(std::move(piece));
  }
  return t;
}

TriangleMeshCurrent2 current2_from_json(const Json& j) {
  if (current_degree(j) != 2) throw ParseError("expected a 2-current");
  TriangleMeshCurrent2 t;
  t.n = dimension(j);
  if (t.n < 2) throw ParseError("a 2-current needs n >= 2");
  for (const Json& p : array(field(j, "pieces"), "pieces")) {
    Triangle tr;
    tr.m = p.contains("m") ? number(p["m"], "m") : 1.0;
    const std::vector<Point> v = vertices(field(p, "vertices"), t.n);
    if (v.size() != 3) throw ParseError("a triangle needs exactly three vertices");
    tr.v = {v[0], v[1], v[2]};
    t.triangles.push_back(std::move(tr));
  }
  return t;
}

Json to_json(const ZeroCurrent& z) {
  Json atoms = Json::array();
  for (const Atom& a : z.atoms()) atoms.push_back({{"x", point_to_json(a.x)}, {"w", a.w}});
  return {{"atoms", std::move(atoms)}};
}

Json to_json(const Bundle& b) {
  Json out = Json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    Json frame = Json::array();
    for (Eigen::Index c = 0; c < b[i].frame().cols(); ++c) frame.push_back(point_to_json(b[i].frame().col(c)));
    out.push_back({{"atom_index", i}, {"frame", std::move(frame)}});
  }
  return out;
}

Bundle bundle_from_json(const Json& j, int n) {
  Bundle b;
  for (const Json& e : array(j, "bundle")) {
    const Json& idx = field(e, "atom_index");
    if (!idx.is_number_unsigned() || idx.get<std::size_t>() != b.size())
      throw ParseError("bundle entries must be listed by consecutive atom_index");
    const Json& frame = array(field(e, "frame"), "frame");
    if (frame.empty()) {
      b.push_back(Subspace::zero(n));
      continue;
    }
    Eigen::MatrixXd cols(n, static_cast<Eigen::Index>(frame.size()));
    for (std::size_t c = 0; c < frame.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = point_from_json(frame[c], n);
    b.push_back(Subspace::from_columns(cols));
  }
  return b;
}

Json to_json(const GridField& f) {
  const GridSpec& s = f.spec();
  Json shape = Json::array();
  for (int a = 0; a < s.n; ++a) shape.push_back(s.shape[a]);
  return {{"origin", point_to_json(s.origin)}, {"spacing", s.spacing}, {"shape", std::move(shape)},
          {"values", f.values()}};
}

GridField grid_from_json(const Json& j) {
  const Json& o = array(field(j, "origin"), "origin");
  const int n = static_cast<int>(o.size());
  if (n != 2 && n != 3) throw ParseError("grid dimension must be 2 or 3");
  const Json& sh = array(field(j, "shape"), "shape");
  if (static_cast<int>(sh.size()) != n) throw ParseError("shape length differs from origin");
  std::vector<int> shape;
  for (const Json& s : sh) shape.push_back(integer(s, "shape"));
  GridSpec spec;
  try {
    spec = GridSpec(point_from_json(o, n), number(field(j, "spacing"), "spacing"), shape);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  const Json& vals = array(field(j, "values"), "values");
  if (vals.size() != spec.size()) throw ParseError("values length differs from shape");
  GridField f(spec);
  for (std::size_t i = 0; i < vals.size(); ++i) f[i] = number(vals[i], "value");
  return f;
}

void write_grid_binary(const std::string& path, const GridField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path);
  const GridSpec& s = f.spec();
  out.write("GMKF", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.n));
  for (int a = 0; a < s.n; ++a) put<double>(out, s.origin[a]);
  put<double>(out, s.spacing);
  for (int a = 0; a < s.n; ++a) put<std::int32_t>(out, s.shape[a]);
  out.write(reinterpret_cast<const char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
}

GridField read_grid_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GMKF", 4) != 0) throw ParseError("not a grid file: " + path);
  const auto n = static_cast<int>(get<std::uint32_t>(in));
  if (n != 2 && n != 3) throw ParseError("grid dimension must be 2 or 3");
  Point o(n);
  for (int a = 0; a < n; ++a) o[a] = get<double>(in);
  const double h = get<double>(in);
  std::vector<int> shape(n);
  for (int a = 0; a < n; ++a) shape[a] = get<std::int32_t>(in);
  GridSpec spec;
  try {
    spec = GridSpec(o, h, shape);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  GridField f(spec);
  if (!in.read(reinterpret_cast<char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(double))))
    throw ParseError("truncated grid file");
  return f;
}

std::string quotient_csv(const std::vector<QuotientRow>& rows) {
  std::ostringstream out;
  out << "atom,v,sigma,Tplus,Tminus,U,Dplus,Dminus,rhs,pass\n";
  for (const QuotientRow& r : rows) {
    out << r.atom << ",";
    for (Eigen::Index i = 0; i < r.v.size(); ++i) out << (i ? " " : "") << format_double(r.v[i]);
    out << "," << format_double(r.sigma) << "," << format_double(r.t_plus) << "," << format_double(r.t_minus) << ","
        << format_double(r.u) << "," << format_double(r.d_plus) << "," << format_double(r.d_minus) << ","
        << format_double(r.rhs) << "," << (r.pass ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace gmk
