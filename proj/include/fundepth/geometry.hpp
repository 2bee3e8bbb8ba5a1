#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fundepth {

using Point2 = Eigen::Vector2d;

// Exact sign of the 2D cross product a.x*b.y - a.y*b.x for double inputs.
int cross_sign(const Point2& a, const Point2& b);

// Sign of the turn p -> q -> r, evaluated exactly on the rounded differences.
inline int orient(const Point2& p, const Point2& q, const Point2& r) {
  return cross_sign(q - p, r - p);
}

// Convex polygon with counter-clockwise vertices. Degenerate polygons are
// allowed: one vertex is a point, two vertices a segment.
struct ConvexPolygon {
  std::vector<Point2> vertices;

  bool empty() const noexcept { return vertices.empty(); }
  std::size_t size() const noexcept { return vertices.size(); }
};

double signed_area(const ConvexPolygon& poly);

// Area centroid; midpoint of the two farthest vertices when the area vanishes.
Point2 centroid(const ConvexPolygon& poly);

// Membership with an absolute distance tolerance.
bool contains(const ConvexPolygon& poly, const Point2& q, double tol = 0.0);

// Monotone-chain hull, counter-clockwise, collinear boundary points dropped.
ConvexPolygon convex_hull(std::span<const Point2> points);

// Keeps the part of `poly` where cross(direction, q - anchor) >= -tol.
ConvexPolygon clip_left(const ConvexPolygon& poly, const Point2& anchor, const Point2& direction, double tol);

// Image of the polygon under q -> center + factor * (q - center).
ConvexPolygon scaled_about(const ConvexPolygon& poly, const Point2& center, double factor);

}  // namespace fundepth
