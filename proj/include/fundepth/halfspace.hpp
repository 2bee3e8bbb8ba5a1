#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fundepth/geometry.hpp"
#include "fundepth/reduction.hpp"

namespace fundepth {

// Number of sample points in the minimizing closed half-plane through a point.
using DepthValue = std::size_t;

// Exact bivariate Tukey depth of theta by an angular sweep, O(n log n).
DepthValue tukey_depth(const Point2& theta, const PointCloud2D& cloud);

// Depth of every sample point with respect to the whole cloud.
std::vector<DepthValue> sample_depths(const PointCloud2D& cloud);

// Iso-depth regions {theta : depth(theta) >= d} of one cloud. Construction
// sorts the cloud around every sample point once (O(n^2 log n)); each region
// is then the intersection of the closed half-planes bounded by lines
// through two sample points that leave fewer than d points strictly outside.
class DepthContours {
 public:
  explicit DepthContours(const PointCloud2D& cloud);

  // Throws EmptyRegion when no point of the plane reaches depth d.
  ConvexPolygon region(DepthValue d) const;

  // Largest d with a nonempty region, and that region.
  DepthValue deepest_level() const;
  ConvexPolygon deepest_region() const;

  // Tolerance used for clipping and membership, proportional to the cloud extent.
  double tolerance() const noexcept { return tol_; }

  // Depth of every sample point, as sample_depths() would return.
  const std::vector<DepthValue>& sample_depths() const noexcept { return depths_; }

 private:
  struct Line {
    Point2 anchor;
    Point2 direction;
    std::uint32_t left = 0;   // points strictly left of anchor->direction
    std::uint32_t right = 0;  // points strictly right
  };

  ConvexPolygon region_or_empty(DepthValue d) const;

  std::vector<Point2> points_;
  std::vector<Line> lines_;
  bool collinear_ = false;
  std::vector<double> line_params_;  // sorted positions along the common line
  Point2 line_origin_ = Point2::Zero();
  Point2 line_dir_ = Point2::Zero();
  Point2 box_lo_ = Point2::Zero();
  Point2 box_hi_ = Point2::Zero();
  double tol_ = 0.0;
  DepthValue max_sample_depth_ = 0;
  std::vector<DepthValue> depths_;
};

ConvexPolygon depth_region(const PointCloud2D& cloud, DepthValue d);

// Centroid of the deepest nonempty depth region.
Point2 tukey_median(const PointCloud2D& cloud);

enum class FenceKind {
  Depth,      // outliers: depth < P_median - (P_median - P_bag) * coef
  Geometric,  // outliers: outside the bag inflated by coef about the median
};

struct Bagplot {
  Point2 median = Point2::Zero();
  ConvexPolygon bag;
  FenceKind fence = FenceKind::Depth;
  double coef = 3.0;
  DepthValue median_depth = 0;  // P_median: maximum sample-point depth
  DepthValue bag_depth = 0;     // P_bag: depth level of the bag
  std::optional<double> fence_depth;  // depth fence only
  ConvexPolygon fence_polygon;        // geometric fence only
  std::vector<DepthValue> depths;
  std::vector<std::size_t> bag_indices;
  std::vector<std::size_t> loop_indices;
  std::vector<std::size_t> outlier_indices;
};

// The bag is the smallest depth region holding at least ceil(n/2) points.
Bagplot build_bagplot(const PointCloud2D& cloud, double coef = 3.0, FenceKind fence = FenceKind::Depth);

struct MedianInterval {
  Point2 lower = Point2::Zero();
  Point2 upper = Point2::Zero();
};

// Coordinate-wise 2.5%/97.5% quantiles of the Tukey median over B smoothed
// bootstrap resamples (Gaussian noise with per-coordinate sd gamma * sd).
MedianInterval bootstrap_tukey_median_ci(const PointCloud2D& cloud, std::size_t resamples, double gamma,
                                         std::uint64_t seed, double level = 0.95);

void to_json(nlohmann::json& j, const Bagplot& bagplot);
void to_json(nlohmann::json& j, const ConvexPolygon& poly);

}  // namespace fundepth
