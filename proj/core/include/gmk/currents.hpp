#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "gmk/exterior.hpp"
#include "gmk/measures.hpp"

namespace gmk {

struct Piece1 {
  double m = 1.0;
  std::vector<Point> vertices;
};

struct PolylineCurrent1 {
  int n = 0;
  std::vector<Piece1> pieces;
};

struct Triangle {
  double m = 1.0;
  std::array<Point, 3> v;
  double area() const;
  // (b - a) ∧ (c - a) / 2, oriented by vertex order.
  KVector area_vector() const;
};

struct TriangleMeshCurrent2 {
  int n = 0;
  std::vector<Triangle> triangles;
};

// Signed point masses merged on quantized keys.
class ZeroCurrent {
 public:
  ZeroCurrent() = default;
  explicit ZeroCurrent(int n, double quant = kDefaultQuant);

  int n() const { return n_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }

  void add(const Point& x, double w);
  // Removes atoms whose weights cancelled exactly.
  void prune();
  double total_variation() const;

 private:
  int n_ = 0;
  double quant_ = kDefaultQuant;
  std::vector<Atom> atoms_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
};

struct FormField {
  int n = 0;
  int h = 0;
  std::function<KCovector(const Point&)> eval;
  double lip = 0.0;
  double sup = 0.0;

  KCovector operator()(const Point& x) const { return eval(x); }
};

FormField constant_form(const KCovector& c);
// 0-form from a scalar function.
FormField scalar_form(int n, std::function<double(const Point&)> f, double lip = 0.0, double sup = 0.0);

PolylineCurrent1 current_from_curve(const PolylineCurve& c);
PolylineCurrent1 current_from_family(const CurveFamily& family);

double mass(const PolylineCurrent1& t);
double mass(const TriangleMeshCurrent2& t);

ZeroCurrent boundary(const PolylineCurrent1& t, double quant = kDefaultQuant);
PolylineCurrent1 boundary2(const TriangleMeshCurrent2& t, double quant = kDefaultQuant);

VectorAtomMeasure atomize(const PolylineCurrent1& t, double delta, double quant = kDefaultQuant);
VectorAtomMeasure atomize(const TriangleMeshCurrent2& t, double delta, double quant = kDefaultQuant);

// Σ <ω(x_i), v_i>.
double pair(const VectorAtomMeasure& t, const FormField& omega);
double pair(const ZeroCurrent& t, const FormField& f);

VectorAtomMeasure interior_current(const VectorAtomMeasure& t, const FormField& omega);

PolylineCurrent1 pushforward_current(const PolylineCurrent1& t, const PointMap& f, double delta);

// d_Tω at every atom, indexed like t. Zero atoms get the zero covector.
std::vector<KCovector> tangential_derivative(const FormField& omega, const VectorAtomMeasure& t, double step);

double verify_boundary_formula(const PolylineCurrent1& t, const FormField& omega, double delta, double step);
double verify_boundary_formula(const TriangleMeshCurrent2& t, const FormField& omega, double delta, double step);
double verify_interior_boundary(const TriangleMeshCurrent2& t, const FormField& omega, double delta, double step);
double verify_pushforward_formula(const PolylineCurrent1& t, const PointMap& f, const FormField& omega,
                                  double delta, double step);

struct ConeClosureOptions {
  double delta = 0.0;  // 0 picks r / 32
  std::vector<Point> candidates;  // empty picks the default lattice
  bool require_closed_in_ball = true;
};

struct ConeClosureResult {
  PolylineCurrent1 u;
  Point x0;
  double mass_in_ball = 0.0;  // |T|(B̄)
  double constant = 0.0;      // M(U) / |T|(B̄), 0 when T misses the ball
};

ConeClosureResult cone_closure(const PolylineCurrent1& t, const Point& center, double r,
                               const ConeClosureOptions& opt = {});

std::vector<Point> default_cone_candidates(const Point& center, double r);

}  // namespace gmk
