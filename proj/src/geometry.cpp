#include "ppm/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace ppm::geometry {

namespace {

int exact_orientation(Point2 a, Point2 b, Point2 c) {
  using boost::multiprecision::cpp_rational;
  const cpp_rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  const cpp_rational det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

}  // namespace

int orientation(Point2 a, Point2 b, Point2 c) {
  const double left = (b.x - a.x) * (c.y - a.y);
  const double right = (b.y - a.y) * (c.x - a.x);
  const double det = left - right;
  // Static bound on the rounding error of the expression above.
  const double bound = 8.8817841970012523e-16 * (std::abs(left) + std::abs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return exact_orientation(a, b, c);
}

std::vector<Point2> convex_hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  if (n < 3) return points;

  // Andrew's monotone chain, popping on non-left turns so collinear points go.
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && orientation(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && orientation(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool in_open_convex_polygon(const std::vector<Point2>& ccw, Point2 p) {
  if (ccw.size() < 3) return false;
  for (std::size_t i = 0; i < ccw.size(); ++i)
    if (orientation(ccw[i], ccw[(i + 1) % ccw.size()], p) <= 0) return false;
  return true;
}

double polygon_area(const std::vector<Point2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

}  // namespace ppm::geometry
