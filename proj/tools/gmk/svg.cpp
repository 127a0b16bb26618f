#include "svg.hpp"

#include <algorithm>
#include <cstdio>

namespace gmk::cli {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Svg::Svg(const BoundingBox& box, int size) : size_(size) {
  const double w = std::max(box.hi[0] - box.lo[0], box.hi[1] - box.lo[1]);
  const double span = w > 0.0 ? w : 1.0;
  const double pad = 0.05 * span;
  x0_ = box.lo[0] - pad;
  y0_ = box.lo[1] - pad;
  scale_ = size / (span + 2.0 * pad);
}

double Svg::px(double x) const { return (x - x0_) * scale_; }
double Svg::py(double y) const { return size_ - (y - y0_) * scale_; }

void Svg::circle(const Point& x, double r_px, const std::string& fill) {
  body_ << "<circle cx=\"" << num(px(x[0])) << "\" cy=\"" << num(py(x[1])) << "\" r=\"" << num(r_px) << "\" fill=\""
        << fill << "\"/>\n";
}

void Svg::polyline(const std::vector<Point>& pts, const std::string& stroke, double width) {
  body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    body_ << (i ? " " : "") << num(px(pts[i][0])) << "," << num(py(pts[i][1]));
  body_ << "\"/>\n";
}

void Svg::line(const Point& a, const Point& b, const std::string& stroke, double width, double opacity) {
  body_ << "<line x1=\"" << num(px(a[0])) << "\" y1=\"" << num(py(a[1])) << "\" x2=\"" << num(px(b[0])) << "\" y2=\""
        << num(py(b[1])) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" stroke-opacity=\""
        << num(opacity) << "\"/>\n";
}

void Svg::text(double x_px, double y_px, const std::string& s, int size) {
  body_ << "<text x=\"" << num(x_px) << "\" y=\"" << num(y_px) << "\" font-family=\"monospace\" font-size=\"" << size
        << "\">" << s << "</text>\n";
}

std::string Svg::str() const {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_ << "\" height=\"" << size_ << "\" viewBox=\"0 0 "
      << size_ << " " << size_ << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
  return out.str();
}

std::string dim_color(int dim) {
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  return colors[std::clamp(dim, 0, 3)];
}

}  // namespace gmk::cli
