#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ppm/geometry.hpp"
#include "ppm/rng.hpp"

using namespace ppm;
using namespace ppm::geometry;

namespace {

// p is extreme iff it is not in the closed hull of the other points, tested
// against every triangle and segment of the others. Points must be distinct.
bool brute_extreme(const std::vector<Point2>& pts, std::size_t i) {
  const Point2 p = pts[i];
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = 0; b < pts.size(); ++b) {
      if (a == i || b == i) continue;
      // On the closed segment ab (including duplicates of p).
      if (orientation(pts[a], pts[b], p) == 0 && std::min(pts[a].x, pts[b].x) <= p.x &&
          p.x <= std::max(pts[a].x, pts[b].x) && std::min(pts[a].y, pts[b].y) <= p.y &&
          p.y <= std::max(pts[a].y, pts[b].y))
        return false;
      for (std::size_t c = 0; c < pts.size(); ++c) {
        if (c == i) continue;
        const int o1 = orientation(pts[a], pts[b], p), o2 = orientation(pts[b], pts[c], p),
                  o3 = orientation(pts[c], pts[a], p);
        if ((o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0))
          if (orientation(pts[a], pts[b], pts[c]) != 0) return false;
      }
    }
  return true;
}

}  // namespace

TEST_CASE("orientation") {
  CHECK(orientation({0, 0}, {1, 0}, {0, 1}) == 1);
  CHECK(orientation({0, 0}, {0, 1}, {1, 0}) == -1);
  CHECK(orientation({0, 0}, {1, 1}, {2, 2}) == 0);
  // Nearly collinear points where the naive determinant is unreliable.
  const Point2 a{0.5, 0.5}, b{12.0, 12.0}, c{24.0, 24.0};
  CHECK(orientation(a, b, c) == 0);
  const Point2 d{0.5 + std::ldexp(1.0, -53), 0.5};
  CHECK(orientation(d, b, c) == -orientation(c, b, d));
  CHECK(orientation(d, b, c) == -1);
}

TEST_CASE("convex hull") {
  SUBCASE("square with interior and edge points") {
    const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}, {0, 0}};
    const auto h = convex_hull(pts);
    CHECK(h == std::vector<Point2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(polygon_area(h) == doctest::Approx(1.0));
  }
  SUBCASE("degenerate inputs") {
    CHECK(convex_hull({}).empty());
    CHECK(convex_hull({{1, 1}}).size() == 1);
    CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}}).size() == 2);
  }
  SUBCASE("random sets against the brute-force extreme test") {
    Rng rng(9);
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<Point2> pts;
      const int n = 3 + trial % 10;
      for (int i = 0; i < n; ++i) {
        // A coarse grid forces collinear and duplicate points.
        pts.push_back({rng.uniform_int(0, 4) * 0.25, rng.uniform_int(0, 4) * 0.25});
      }
      const auto h = convex_hull(pts);
      std::vector<Point2> uniq = pts;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      std::vector<Point2> want;
      for (std::size_t i = 0; i < uniq.size(); ++i)
        if (brute_extreme(uniq, i)) want.push_back(uniq[i]);
      if (want.size() >= 3) {
        std::vector<Point2> got = h;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
        for (std::size_t i = 0; i < h.size(); ++i)
          CHECK(orientation(h[i], h[(i + 1) % h.size()], h[(i + 2) % h.size()]) == 1);
      }
    }
  }
}

TEST_CASE("open polygon membership") {
  const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(in_open_convex_polygon(sq, {0.5, 0.5}));
  CHECK_FALSE(in_open_convex_polygon(sq, {0.5, 0.0}));
  CHECK_FALSE(in_open_convex_polygon(sq, {1.0, 1.0}));
  CHECK_FALSE(in_open_convex_polygon(sq, {1.5, 0.5}));
}
