#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gmk/exterior.hpp"

namespace gmk {

using Point = Eigen::VectorXd;
using PointMap = std::function<Point(const Point&)>;
using PointPredicate = std::function<bool(const Point&)>;

inline constexpr double kDefaultQuant = 1e-7;

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept;
};

Key quantize(const Point& x, double quant);

struct Atom {
  Point x;
  double w = 0.0;
};

// Weighted point cloud; atoms whose positions share a quantized key are merged.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(int n, double quant = kDefaultQuant);

  int n() const { return n_; }
  double quant() const { return quant_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }

  // Returns the index of the (possibly pre-existing) atom.
  std::size_t add(const Point& x, double w);
  std::optional<std::size_t> find(const Point& x) const;
  double total_mass() const;

 private:
  int n_ = 0;
  double quant_ = kDefaultQuant;
  std::vector<Atom> atoms_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
};

struct PolylineCurve {
  std::vector<Point> vertices;
  double mult = 1.0;

  int n() const { return vertices.empty() ? 0 : static_cast<int>(vertices.front().size()); }
  std::size_t segments() const { return vertices.size() < 2 ? 0 : vertices.size() - 1; }
  double length() const;
};

struct CurveFamily {
  struct Member {
    double dt = 1.0;
    PolylineCurve curve;
  };
  int n = 0;
  std::vector<Member> members;
};

struct VectorAtom {
  Point x;
  KVector v;
};

class VectorAtomMeasure {
 public:
  VectorAtomMeasure() = default;
  VectorAtomMeasure(int n, int k, double quant = kDefaultQuant);

  int n() const { return n_; }
  int k() const { return k_; }
  double quant() const { return quant_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const VectorAtom& operator[](std::size_t i) const { return atoms_[i]; }
  const std::vector<VectorAtom>& atoms() const { return atoms_; }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }

  std::size_t add(const Point& x, const KVector& v);
  std::optional<std::size_t> find(const Point& x) const;
  // Σ |v_i|.
  double mass() const;

 private:
  int n_ = 0;
  int k_ = 0;
  double quant_ = kDefaultQuant;
  std::vector<VectorAtom> atoms_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
};

struct BoundingBox {
  Point lo;
  Point hi;
  double diagonal() const { return lo.size() == 0 ? 0.0 : (hi - lo).norm(); }
};

BoundingBox bounding_box(const std::vector<Point>& pts);
BoundingBox bounding_box(const AtomicMeasure& mu);
BoundingBox bounding_box(const CurveFamily& family);

// Number of equal pieces a segment of length len is cut into so each is ≤ delta.
int piece_count(double len, double delta);

AtomicMeasure h1_measure(const PolylineCurve& curve, double delta, double quant = kDefaultQuant);
AtomicMeasure integrate_family(const CurveFamily& family, double delta, double quant = kDefaultQuant);
AtomicMeasure restrict(const AtomicMeasure& mu, const PointPredicate& pred);
AtomicMeasure pushforward_measure(const AtomicMeasure& mu, const PointMap& f);

// |T| as an atomic measure on the same keys.
AtomicMeasure variation_measure(const VectorAtomMeasure& t);

struct RadonNikodym {
  std::vector<KVector> density;  // indexed like mu
  VectorAtomMeasure singular;
};

RadonNikodym radon_nikodym(const VectorAtomMeasure& t, const AtomicMeasure& mu);

double default_delta(const BoundingBox& box);

}  // namespace gmk
