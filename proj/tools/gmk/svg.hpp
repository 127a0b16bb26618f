#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "gmk/measures.hpp"

namespace gmk::cli {

// Plane drawing mapped from a data box onto a square canvas (y up).
class Svg {
 public:
  Svg(const BoundingBox& box, int size = 640);

  void circle(const Point& x, double r_px, const std::string& fill);
  void polyline(const std::vector<Point>& pts, const std::string& stroke, double width = 1.0);
  void line(const Point& a, const Point& b, const std::string& stroke, double width = 1.0, double opacity = 1.0);
  void text(double x_px, double y_px, const std::string& s, int size = 12);
  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;

  int size_;
  double x0_, y0_, scale_;
  std::ostringstream body_;
};

// One colour per bundle dimension.
std::string dim_color(int dim);

}  // namespace gmk::cli
