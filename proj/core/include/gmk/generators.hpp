#pragma once

#include "gmk/currents.hpp"
#include "gmk/measures.hpp"

namespace gmk {

inline constexpr int kMaxDepth = 7;
inline constexpr int kMaxGrid = 512;

// Product of n copies of the 1/4-Cantor set at the given depth; equal weights per cell, total 1.
AtomicMeasure cantor_dust(int depth, int n = 2, double quant = kDefaultQuant);
// Centers of the 2^depth intervals of the middle-thirds Cantor set in [0, 1].
std::vector<double> middle_thirds_cantor(int depth);
AtomicMeasure sierpinski_carpet(int depth, double quant = kDefaultQuant);
// m^n cell centers of the unit cube, weight m^-n each.
AtomicMeasure grid_lebesgue(int n, int m, double quant = kDefaultQuant);

// Koch curve from (0,0) to (1,0): 4^depth segments of length 3^-depth.
PolylineCurve koch_curve(int depth);
// Closed regular k-gon inscribed in the circle of the given radius.
PolylineCurve circle_curve(int k, double radius = 1.0, const Point& center = Point::Zero(2));
PolylineCurve segment_curve(const Point& a, const Point& b);

}  // namespace gmk
