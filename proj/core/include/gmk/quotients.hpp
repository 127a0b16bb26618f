#pragma once

#include <functional>
#include <vector>

#include "gmk/grassmannian.hpp"
#include "gmk/grid_field.hpp"

namespace gmk {

using ScalarFn = std::function<double(const Point&)>;

// {σ·2^{-j}} for j = 0..J with σ·2^{-J} ≥ min_h; empty when σ < min_h.
std::vector<double> dyadic_ladder(double sigma, double min_h);

struct QuotientRow {
  std::size_t atom = 0;
  Point v;
  double sigma = 0.0;
  double t_plus = 0.0;
  double t_minus = 0.0;
  double u = 0.0;
  double d_plus = 0.0;
  double d_minus = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::vector<double> h;
  std::vector<double> q;        // (f(x + h v) − f(x)) / h along the ladder
  std::vector<double> u_by_sigma;  // U over the ladder tail starting at each h; nonincreasing
};

// Ladder must start at sigma, halve at each step and stay ≥ 2Δ. Throws if x or x + σv is off grid.
QuotientRow difference_quotients(const GridField& f, const Point& x, const Point& v, double sigma,
                                 const std::vector<double>& ladder);
// Same operators on an analytic function (no grid constraint on the ladder floor).
QuotientRow difference_quotients(const ScalarFn& f, const Point& x, const Point& v, double sigma,
                                 const std::vector<double>& ladder);

// max over h of |f(x + h) − f(x) − α·h| / |h|.
double deviation_from_linearity(const ScalarFn& f, const Point& x, const std::vector<Point>& increments,
                                const Point& alpha);

struct DeviationSampling {
  int levels = 12;    // radii δ·2^{-j}, j < levels
  int resolution = 4;  // direction coordinates in {-resolution..resolution} on the frame of V
};

// Increments h ∈ V with 0 < |h| ≤ δ used by the sampled sup.
std::vector<Point> deviation_increments(const Subspace& v, double delta, const DeviationSampling& s = {});
double deviation_from_linearity(const ScalarFn& f, const Point& x, const Subspace& v, const Point& alpha,
                                double delta, const DeviationSampling& s = {});

struct NondiffCheck {
  double pass_fraction = 0.0;               // mass of atoms passing every direction / total
  std::vector<double> direction_fraction;  // per direction
  std::vector<char> atom_pass;
  std::vector<QuotientRow> rows;           // atom-major, one per (atom, direction)
};

// U at the smallest admissible σ against dist(v, V(x))/(3√d) − tol, d = codim V(x).
NondiffCheck check_nondiff(const GridField& f, const AtomicMeasure& mu, const Bundle& bundle,
                           const std::vector<Point>& directions, const std::vector<double>& sigmas,
                           double tol = 0.02);

}  // namespace gmk
