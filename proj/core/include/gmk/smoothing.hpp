#pragma once

#include <functional>
#include <vector>

#include "gmk/grassmannian.hpp"
#include "gmk/grid_field.hpp"

namespace gmk {

struct RegularizeResult {
  GridField g;
  double lip_in = 0.0;
  double lip_out = 0.0;
  double outer = 0.0;             // D: largest node distance to K; annulus k is D·(2^{-k-1}, 2^{-k}]
  std::vector<int> radii;         // box radius in cells per annulus
  std::vector<char> keep;         // nodes copied bit-exactly (cells meeting K)
};

// Smooths f away from K with dyadic annuli while keeping f on the cells that meet K.
RegularizeResult regularize_keep(const GridField& f, const std::vector<Point>& k,
                                 const std::function<double(double)>& phi, double eps);

struct AnisotropicResult {
  GridField f;
  double r_par = 0.0;   // kernel radius along V
  double r_perp = 0.0;  // eps·r_par / L
  double lip = 0.0;     // L, measured on the input
  double m = 0.0;       // max over k ≤ n of 18 c_{k-1}/c_k, c_k the unit-ball volume in R^k
  std::size_t samples = 0;
};

AnisotropicResult anisotropic_smooth(const GridField& f, const Subspace& v, double eps, double r_prime);

// 18·c_{k−1}/c_k maximized over k = 1..n.
double smoothing_constant(int n);

}  // namespace gmk
