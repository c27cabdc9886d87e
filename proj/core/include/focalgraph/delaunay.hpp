#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace focalgraph {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

using Triangle = std::array<std::int32_t, 3>;

// Twice the signed area of (a, b, c); positive when counter-clockwise.
double orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept;

// > 0 when d lies inside the circumcircle of the counter-clockwise triangle (a, b, c).
// Exact for integer coordinates up to 4096 in magnitude.
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) noexcept;

inline constexpr double kIncircleEpsilon = 1e-9;

// Incremental Bowyer-Watson triangulation. Triangles index into `points`, are
// counter-clockwise, and cover the convex hull. Duplicate points are skipped.
// Fewer than three points, or all collinear, gives no triangles. Co-circular
// ties are resolved by insertion order.
std::vector<Triangle> delaunay_triangulate(std::span<const Point2> points);

}  // namespace focalgraph
