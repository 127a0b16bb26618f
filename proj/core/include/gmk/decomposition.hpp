#pragma once

#include <string>
#include <vector>

#include "gmk/currents.hpp"
#include "gmk/grassmannian.hpp"
#include "gmk/measures.hpp"

namespace gmk {

// C(e, α) = {v : v·e ≥ cos α |v|}.
struct ConeSpec {
  Point e;
  double alpha = 0.0;

  ConeSpec() = default;
  ConeSpec(Point dir, double angle);
  bool contains(const Point& v) const;
};

// 8 cones at α = 30° in the plane, 26 at α = 35° in space; axis pairs at 45° otherwise.
std::vector<ConeSpec> default_cone_net(int n);
// Every sampled unit direction lies strictly inside some cone (by at least `slack` radians).
bool cones_cover(const std::vector<ConeSpec>& cones, int n, double slack = 1e-9);

struct FlowEdge {
  int from = 0;
  int to = 0;
  double m = 0.0;
  double length = 0.0;
};

struct FlowGraph {
  int n = 0;
  std::vector<Point> nodes;  // sorted by quantized key
  std::vector<FlowEdge> edges;

  static FlowGraph from_current(const PolylineCurrent1& t, double quant = kDefaultQuant);
  // out-flow minus in-flow per node.
  std::vector<double> divergence() const;
};

struct DecompositionPiece {
  double weight = 0.0;
  PolylineCurve curve;
  bool loop = false;
  std::vector<int> edges;
};

struct Decomposition {
  FlowGraph graph;
  std::vector<DecompositionPiece> pieces;
};

Decomposition smirnov_decompose(const PolylineCurrent1& t, double quant = kDefaultQuant);
CurveFamily family_from_decomposition(const Decomposition& d);
// Σ weight·len(piece) − M(T), summed with compensation.
double mass_residual(const Decomposition& d, const PolylineCurrent1& t);
// max_e |Σ_{pieces ∋ e} weight − m_e|.
double reconstruction_error(const Decomposition& d);

// radius <= 0 selects 1e-6 of the bounding-box diagonal.
Bundle bundle_from_family(const CurveFamily& family, const AtomicMeasure& mu, double radius = 0.0);

struct ConeCurve {
  PolylineCurve curve;
  std::vector<std::size_t> atoms;  // captured atoms in chain order
  double captured_mass = 0.0;
  double captured_length = 0.0;  // H¹ of the curve inside the ρ-balls around atoms
  double curve_length = 0.0;
  double rho = 0.0;
};

ConeCurve cone_curve_extract(const AtomicMeasure& mu, const ConeSpec& cone, double step_min, double step_max);

struct CertificateParams {
  double step_min = 0.0;  // 0: quantization step
  double step_max = 0.0;  // 0: diameter, or 16 nearest-neighbour spacings above 2048 atoms
};

struct CertificateReport {
  bool certified = false;
  double threshold = 0.0;
  double diameter = 0.0;
  double step_min = 0.0;
  double step_max = 0.0;
  std::vector<double> fractions;       // captured length / diameter per cone
  std::vector<double> mass_fractions;  // captured mass / total per cone
  CurveFamily witness;
};

CertificateReport unrectifiability_certificate(const AtomicMeasure& mu, const std::vector<ConeSpec>& cones,
                                               double threshold, const CertificateParams& params = {});

struct BundleParams {
  double radius = 0.0;    // family matching radius; 0: 1e-6 of the diagonal
  double step_min = 0.0;  // 0: quantization step
  double step_max = 0.0;  // 0: 4 nearest-neighbour spacings
  double min_gain = 1e-3;
  double min_density = 0.8;
  double angle_tol = 3.0 * 3.14159265358979323846 / 180.0;
  int max_rounds = 4096;
};

struct ConeRoundLog {
  ConeSpec cone;
  int accepted = 0;
  double captured_mass = 0.0;
  std::vector<PolylineCurve> curves;
};

struct BundleReport {
  Bundle bundle;
  std::vector<double> dim_mass;  // μ-mass per dimension 0..n
  std::vector<int> dim_count;
  std::vector<std::pair<std::string, double>> f_history;
  std::vector<ConeRoundLog> cones;
  double radius = 0.0;
  double step_min = 0.0;
  double step_max = 0.0;
  double rho = 0.0;
  double rank_tol = 0.0;
};

BundleReport decomposability_bundle(const AtomicMeasure& mu, const std::vector<CurveFamily>& supplied,
                                    const std::vector<PolylineCurrent1>& currents,
                                    const std::vector<ConeSpec>& cones, const BundleParams& params = {});

// Mass fraction of atoms where δ(span τ(x), V(x)) ≤ sin(angle_tol); τ is the density of t w.r.t. mu.
double verify_span_inclusion(const VectorAtomMeasure& t, const AtomicMeasure& mu, const Bundle& bundle,
                             double angle_tol);

}  // namespace gmk
