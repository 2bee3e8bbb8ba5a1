#include "fundepth/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fundepth {

namespace {

// Knuth's two-sum: a + b == s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  e = (a - av) + (b - bv);
}

}  // namespace

int cross_sign(const Point2& a, const Point2& b) {
  const double p1 = a.x() * b.y();
  const double p2 = a.y() * b.x();
  const double d = p1 - p2;
  if (!std::isfinite(p1) || !std::isfinite(p2)) return (d > 0) - (d < 0);
  // Fast path: the rounded difference is far enough from zero to be trusted.
  const double magnitude = std::abs(p1) + std::abs(p2);
  if (magnitude > 1e-280 && std::abs(d) > 3.3306690738754716e-16 * magnitude) return d > 0 ? 1 : -1;

  const double e1 = std::fma(a.x(), b.y(), -p1);
  const double e2 = std::fma(a.y(), b.x(), -p2);
  // Grow a nonoverlapping expansion of the four exact terms; its sign is the
  // sign of the largest nonzero component.
  std::array<double, 4> terms{e1, -e2, p1, -p2};
  std::array<double, 4> h{};
  std::size_t len = 0;
  for (double q : terms) {
    for (std::size_t i = 0; i < len; ++i) {
      double s = 0.0;
      double e = 0.0;
      two_sum(q, h[i], s, e);
      h[i] = e;
      q = s;
    }
    h[len++] = q;
  }
  for (std::size_t i = len; i-- > 0;)
    if (h[i] != 0.0) return h[i] > 0.0 ? 1 : -1;
  return 0;
}

double signed_area(const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * twice;
}

Point2 centroid(const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  if (v.empty()) return Point2::Zero();
  if (v.size() == 1) return v.front();
  // Shift to the first vertex to limit cancellation.
  const Point2 origin = v.front();
  double twice_area = 0.0;
  Point2 acc = Point2::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i] - origin;
    const Point2 b = v[(i + 1) % v.size()] - origin;
    const double w = a.x() * b.y() - a.y() * b.x();
    twice_area += w;
    acc += w * (a + b);
  }
  double extent = 0.0;
  std::size_t fa = 0;
  std::size_t fb = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double d = (v[i] - v[j]).norm();
      if (d > extent) {
        extent = d;
        fa = i;
        fb = j;
      }
    }
  if (std::abs(twice_area) <= 1e-12 * extent * extent) return 0.5 * (v[fa] + v[fb]);
  return origin + acc / (3.0 * twice_area);
}

bool contains(const ConvexPolygon& poly, const Point2& q, double tol) {
  const auto& v = poly.vertices;
  if (v.empty()) return false;
  if (v.size() == 1) return (q - v.front()).norm() <= tol;
  if (v.size() == 2) {
    const Point2 ab = v[1] - v[0];
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((q - v[0]).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (q - (v[0] + t * ab)).norm() <= tol;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    const Point2 edge = b - a;
    const double len = edge.norm();
    if (len == 0.0) continue;
    const Point2 rel = q - a;
    const double c = edge.x() * rel.y() - edge.y() * rel.x();
    if (c < -tol * len) return false;
  }
  return true;
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return {pts};
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() == 1 || (hull.size() == 2 && hull[0] == hull[1])) hull.resize(1);
  return {hull};
}

ConvexPolygon clip_left(const ConvexPolygon& poly, const Point2& anchor, const Point2& direction, double tol) {
  const auto& v = poly.vertices;
  auto side = [&](const Point2& q) {
    const Point2 rel = q - anchor;
    return direction.x() * rel.y() - direction.y() * rel.x();
  };
  const double slack = tol * direction.norm();
  ConvexPolygon out;
  if (v.size() <= 2) {
    // Points and segments: clip the parameter interval.
    for (const auto& q : v)
      if (side(q) >= -slack) out.vertices.push_back(q);
    if (v.size() == 2 && out.vertices.size() == 1) {
      const double sa = side(v[0]);
      const double sb = side(v[1]);
      const double t = (sa + slack) / (sa - sb);
      out.vertices.push_back(v[0] + t * (v[1] - v[0]));
    }
    return out;
  }
  out.vertices.reserve(v.size() + 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    const double sa = side(a) + slack;
    const double sb = side(b) + slack;
    if (sa >= 0.0) out.vertices.push_back(a);
    if ((sa >= 0.0) != (sb >= 0.0)) out.vertices.push_back(a + (sa / (sa - sb)) * (b - a));
  }
  return out;
}

ConvexPolygon scaled_about(const ConvexPolygon& poly, const Point2& center, double factor) {
  ConvexPolygon out;
  out.vertices.reserve(poly.size());
  for (const auto& q : poly.vertices) out.vertices.push_back(center + factor * (q - center));
  return out;
}

}  // namespace fundepth
