#pragma once

#include <vector>

#include "gmk/decomposition.hpp"
#include "gmk/errors.hpp"
#include "gmk/grid_field.hpp"

namespace gmk {

// K captures more than ε along some lattice cone path even at δ = 2Δ; carries that path.
class NotConeNull : public ResolutionError {
 public:
  NotConeNull(const std::string& what, PolylineCurve witness)
      : ResolutionError(what), witness_(std::move(witness)) {}
  const PolylineCurve& witness() const { return witness_; }

 private:
  PolylineCurve witness_;
};

// Lattice step p with entries in {-1, 0, 1} and p/|p| = e; throws for other directions.
Index3 lattice_step(const Point& e);
// Steps d in {-1, 0, 1}^n with angle(d, p) ≤ 45°.
std::vector<Index3> cone_stencil(int n, const Index3& p);

struct PerturbationResult {
  GridField g;
  double delta = 0.0;        // radius of A = K_δ
  double max_capture = 0.0;  // max over stencil paths of the length inside A
  int mollifier = 0;         // box radius in cells
  int iterations = 0;
  Index3 step{0, 0, 0};
  std::vector<Index3> stencil;
};

PerturbationResult perturbation_g(const std::vector<Point>& k, const ConeSpec& cone, double eps, const GridSpec& grid);

struct SlopeReport {
  double sup = 0.0;
  double min_e = 0.0;  // forward slope along e over all nodes
  double max_e = 0.0;
  double min_e_on_k = 0.0;  // over the e-edges of the cells containing K
  double max_transverse = 0.0;
  std::size_t k_edges = 0;
};

// Grid-exhaustive slopes; transverse steps are the lattice steps orthogonal to p.
SlopeReport slope_report(const GridField& g, const Index3& p, const std::vector<Point>& k);

// φ·g with φ = 1 on B(center, r), 0 off B(center, r_prime), smoothstep in between.
// Throws when r ≥ r_prime or when |g| exceeds eps_prime inside the support.
GridField localized_bump(const GridField& g, const Point& center, double r, double r_prime, double eps_prime);

}  // namespace gmk
