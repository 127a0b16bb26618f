#pragma once

#include <limits>
#include <numbers>
#include <vector>

#include "gmk/grassmannian.hpp"
#include "gmk/grid_field.hpp"
#include "gmk/measures.hpp"
#include "gmk/perturbation.hpp"
#include "gmk/quotients.hpp"

namespace gmk {

struct NondiffParams {
  double spacing = 0.0;     // 0: median nearest-neighbour distance / 16
  double margin = 0.0;      // grid padding around the atoms; 0: max(2 r0, max σ) + 4Δ
  double patch_angle = 5.0 * std::numbers::pi / 180.0;
  double cone_angle = 30.0 * std::numbers::pi / 180.0;
  double eps = 0.0;         // cap on bump heights; 0: half the smallest σ
  double c_cut = 2.0;       // bump height ≤ c_cut·(r' − r)
  double r0 = 0.0;          // first ball radius; 0: a quarter of the smallest σ
  int radius_levels = 10;
  int max_failures = 2;     // failed bumps tolerated per radius level
  double lip_budget = 2.0;  // per patch function
  int max_patches = 64;
  std::vector<Point> directions;  // target directions; empty: coordinate axes
  std::vector<double> sigmas;     // quotient scales; empty: 16Δ
  double tol = 0.02;
};

struct Patch {
  Subspace v;
  std::vector<std::size_t> atoms;
  int codim = 0;
  double weight = 0.0;  // 2^{-i}
};

struct BallLog {
  Point center;
  double r = 0.0;
  double r_prime = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  int sign = 1;
  std::vector<std::size_t> atoms;
};

struct RoundLog {
  int patch = 0;
  int round = 0;
  Point e;
  double target_mass = 0.0;    // μ(E'): atoms failing some direction
  double selected_mass = 0.0;  // μ(E'_k)
  double covered_mass = 0.0;   // μ(K)
  double bound = 0.0;          // μ(E')/(4d)
  int rejected = 0;
  std::vector<BallLog> balls;
};

struct NondiffResult {
  GridField f;
  std::vector<Patch> patches;
  std::vector<RoundLog> rounds;
  double lipschitz = 0.0;
  double spacing = 0.0;
  std::vector<Point> directions;
  std::vector<double> sigmas;
};

// Lattice directions with entries in {-1, 0, 1}, first nonzero entry positive; axes first.
std::vector<Point> lattice_directions(int n);

NondiffResult assemble_nondiff(const AtomicMeasure& mu, const Bundle& bundle, int rounds,
                               const NondiffParams& params = {});

}  // namespace gmk
