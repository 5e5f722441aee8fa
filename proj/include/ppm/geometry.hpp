#pragma once

#include <vector>

#include "ppm/configuration.hpp"

namespace ppm::geometry {

/// Sign of the orientation determinant of (a, b, c): +1 counterclockwise,
/// -1 clockwise, 0 collinear. Exact for all finite doubles: a
/// floating-point filter with a forward error bound decides the easy
/// cases and exact rational arithmetic the rest.
int orientation(Point2 a, Point2 b, Point2 c);

/// Strictly extreme points of the convex hull in counterclockwise order,
/// starting from the lexicographically smallest. Duplicates and points on
/// hull edges (collinear) are dropped. Fewer than three points are
/// returned unchanged in lexicographic order when the set is degenerate.
std::vector<Point2> convex_hull(std::vector<Point2> points);

/// True iff p lies in the open interior of the CCW convex polygon.
bool in_open_convex_polygon(const std::vector<Point2>& ccw, Point2 p);

/// Signed area of a polygon (positive for CCW).
double polygon_area(const std::vector<Point2>& poly);

}  // namespace ppm::geometry
