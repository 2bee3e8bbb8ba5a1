#include "fundepth/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "fundepth/error.hpp"
#include "fundepth/parallel.hpp"
#include "fundepth/rng.hpp"
#include "fundepth/stats.hpp"

namespace fundepth {

namespace {

inline int half_of(const Point2& d) { return (d.y() > 0.0 || (d.y() == 0.0 && d.x() > 0.0)) ? 0 : 1; }

inline bool angle_less(const Point2& a, const Point2& b) {
  const int ha = half_of(a);
  const int hb = half_of(b);
  if (ha != hb) return ha < hb;
  return cross_sign(a, b) > 0;
}

inline bool same_direction(const Point2& a, const Point2& b) {
  return half_of(a) == half_of(b) && cross_sign(a, b) == 0;
}

inline bool opposite_direction(const Point2& a, const Point2& b) {
  return half_of(a) != half_of(b) && cross_sign(a, b) == 0;
}

// Directions from a center to the other points, grouped by exact angle and
// sorted counter-clockwise. For each group g with angle phi:
//   open[g]     = #points with angle in (phi, phi + pi)
//   opposite[g] = #points with angle exactly phi + pi
struct AngularSweep {
  std::vector<Point2> direction;
  std::vector<std::uint32_t> size;
  std::vector<std::uint32_t> open;
  std::vector<std::uint32_t> opposite;
  std::size_t total = 0;       // points distinct from the center
  std::size_t coincident = 0;  // points equal to the center

  AngularSweep(const Point2& center, const std::vector<Point2>& points, std::size_t skip) {
    std::vector<Point2> dirs;
    dirs.reserve(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == skip) continue;
      if (points[j] == center) {
        ++coincident;
        continue;
      }
      dirs.push_back(points[j] - center);
    }
    std::sort(dirs.begin(), dirs.end(), angle_less);
    total = dirs.size();
    const std::size_t k = total;
    std::vector<std::size_t> start;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == 0 || !same_direction(dirs[j - 1], dirs[j])) {
        start.push_back(j);
        direction.push_back(dirs[j]);
        size.push_back(0);
      }
      ++size.back();
    }
    const std::size_t groups = start.size();
    open.resize(groups);
    opposite.resize(groups);
    std::size_t j = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t first_other = start[g] + size[g];
      const std::size_t limit = start[g] + k;
      j = std::max(j, first_other);
      while (j < limit && cross_sign(direction[g], dirs[j % k]) > 0) ++j;
      std::size_t q = j;
      while (q < limit && opposite_direction(direction[g], dirs[q % k])) ++q;
      open[g] = static_cast<std::uint32_t>(j - first_other);
      opposite[g] = static_cast<std::uint32_t>(q - j);
    }
  }

  // Minimum count over open half-planes whose boundary passes through the
  // center and avoids every other point; the closed-half-plane minimum is
  // attained by such a generic half-plane.
  std::size_t min_generic_count() const {
    if (total == 0) return 0;
    std::size_t best = total;
    for (std::size_t g = 0; g < direction.size(); ++g) {
      const std::size_t ccw = open[g] + opposite[g];
      best = std::min({best, ccw, total - ccw});
    }
    return best;
  }
};

ConvexPolygon cleanup(ConvexPolygon poly, double merge) {
  auto& v = poly.vertices;
  std::vector<Point2> kept;
  for (const auto& q : v)
    if (kept.empty() || (q - kept.back()).norm() > merge) kept.push_back(q);
  while (kept.size() > 1 && (kept.front() - kept.back()).norm() <= merge) kept.pop_back();
  v = std::move(kept);
  if (v.size() >= 3) {
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
    if (std::abs(signed_area(poly)) <= merge * extent) v = {v[fa], v[fb]};
  }
  return poly;
}

}  // namespace

DepthValue tukey_depth(const Point2& theta, const PointCloud2D& cloud) {
  const AngularSweep sweep(theta, cloud.points, std::numeric_limits<std::size_t>::max());
  return sweep.coincident + sweep.min_generic_count();
}

std::vector<DepthValue> sample_depths(const PointCloud2D& cloud) {
  std::vector<DepthValue> depths(cloud.size());
  parallel_for(cloud.size(), [&](std::size_t i) {
    const AngularSweep sweep(cloud.points[i], cloud.points, i);
    depths[i] = 1 + sweep.coincident + sweep.min_generic_count();
  });
  return depths;
}

DepthContours::DepthContours(const PointCloud2D& cloud) : points_(cloud.points) {
  const std::size_t n = points_.size();
  if (n == 0) throw Error(Errc::TooFewPoints, "depth regions need at least one point");
  box_lo_ = box_hi_ = points_.front();
  for (const auto& p : points_) {
    box_lo_ = box_lo_.cwiseMin(p);
    box_hi_ = box_hi_.cwiseMax(p);
  }
  const double scale = (box_hi_ - box_lo_).norm();
  tol_ = scale > 0.0 ? 1e-10 * scale : 1e-12;

  std::size_t distinct = n;
  for (std::size_t j = 1; j < n; ++j)
    if (points_[j] != points_[0]) {
      distinct = j;
      break;
    }
  if (distinct == n) {
    collinear_ = true;
    line_origin_ = points_[0];
    line_params_.assign(n, 0.0);
    depths_.assign(n, n);
    max_sample_depth_ = n;
    return;
  }
  collinear_ = true;
  for (std::size_t j = 0; j < n && collinear_; ++j)
    if (orient(points_[0], points_[distinct], points_[j]) != 0) collinear_ = false;
  if (collinear_) {
    line_origin_ = points_[0];
    line_dir_ = points_[distinct] - points_[0];
    const double len2 = line_dir_.squaredNorm();
    for (const auto& p : points_) line_params_.push_back((p - line_origin_).dot(line_dir_) / len2);
    std::vector<double> unsorted = line_params_;
    std::sort(line_params_.begin(), line_params_.end());
    depths_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = unsorted[j];
      const auto below = static_cast<std::size_t>(std::upper_bound(line_params_.begin(), line_params_.end(), t) -
                                                  line_params_.begin());
      const auto above = static_cast<std::size_t>(line_params_.end() -
                                                  std::lower_bound(line_params_.begin(), line_params_.end(), t));
      depths_[j] = std::min(below, above);
    }
    max_sample_depth_ = *std::max_element(depths_.begin(), depths_.end());
    return;
  }

  std::vector<std::vector<Line>> per_point(n);
  std::vector<DepthValue> depth(n);
  parallel_for(n, [&](std::size_t i) {
    const AngularSweep sweep(points_[i], points_, i);
    depth[i] = 1 + sweep.coincident + sweep.min_generic_count();
    auto& lines = per_point[i];
    lines.reserve(sweep.direction.size());
    for (std::size_t g = 0; g < sweep.direction.size(); ++g) {
      Line line;
      line.anchor = points_[i];
      line.direction = sweep.direction[g];
      line.left = sweep.open[g];
      line.right = static_cast<std::uint32_t>(sweep.total - sweep.open[g] - sweep.size[g] - sweep.opposite[g]);
      lines.push_back(line);
    }
  });
  for (auto& lines : per_point) {
    lines_.insert(lines_.end(), lines.begin(), lines.end());
    std::vector<Line>().swap(lines);
  }
  max_sample_depth_ = *std::max_element(depth.begin(), depth.end());
  depths_ = std::move(depth);
}

ConvexPolygon DepthContours::region_or_empty(DepthValue d) const {
  if (d == 0) throw Error(Errc::InvalidArgument, "depth level must be at least 1");
  const std::size_t n = points_.size();
  if (collinear_) {
    if (line_dir_ == Point2::Zero()) return d <= n ? ConvexPolygon{{line_origin_}} : ConvexPolygon{};
    if (d > n - d + 1) return {};
    const double lo = line_params_[d - 1];
    const double hi = line_params_[n - d];
    if (lo == hi) return {{line_origin_ + lo * line_dir_}};
    return {{line_origin_ + lo * line_dir_, line_origin_ + hi * line_dir_}};
  }

  const Point2 pad = Point2::Constant(0.01 * (box_hi_ - box_lo_).norm());
  const Point2 lo = box_lo_ - pad;
  const Point2 hi = box_hi_ + pad;
  ConvexPolygon poly{{lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}}};
  const auto limit = static_cast<std::uint32_t>(d - 1);

  auto apply = [&](const Point2& anchor, const Point2& direction) {
    const double slack = tol_ * direction.norm();
    bool all_inside = true;
    for (const auto& q : poly.vertices) {
      const Point2 rel = q - anchor;
      if (direction.x() * rel.y() - direction.y() * rel.x() < -slack) {
        all_inside = false;
        break;
      }
    }
    if (!all_inside) poly = clip_left(poly, anchor, direction, tol_);
  };
  for (const auto& line : lines_) {
    if (line.right <= limit) apply(line.anchor, line.direction);
    if (poly.empty()) return {};
    if (line.left <= limit) apply(line.anchor, -line.direction);
    if (poly.empty()) return {};
  }
  return cleanup(std::move(poly), 1e3 * tol_);
}

ConvexPolygon DepthContours::region(DepthValue d) const {
  ConvexPolygon poly = region_or_empty(d);
  if (poly.empty())
    throw Error(Errc::EmptyRegion, "no point reaches depth " + std::to_string(d) + " (cloud of " +
                                       std::to_string(points_.size()) + " points)");
  return poly;
}

DepthValue DepthContours::deepest_level() const {
  DepthValue d = max_sample_depth_;
  while (d < points_.size() && !region_or_empty(d + 1).empty()) ++d;
  return d;
}

ConvexPolygon DepthContours::deepest_region() const {
  DepthValue d = max_sample_depth_;
  ConvexPolygon best = region(d);
  while (d < points_.size()) {
    ConvexPolygon next = region_or_empty(++d);
    if (next.empty()) break;
    best = std::move(next);
  }
  return best;
}

ConvexPolygon depth_region(const PointCloud2D& cloud, DepthValue d) { return DepthContours(cloud).region(d); }

Point2 tukey_median(const PointCloud2D& cloud) {
  if (cloud.size() == 0) throw Error(Errc::TooFewPoints, "median of an empty cloud");
  if (cloud.size() == 1) return cloud.points.front();
  return centroid(DepthContours(cloud).deepest_region());
}

Bagplot build_bagplot(const PointCloud2D& cloud, double coef, FenceKind fence) {
  const std::size_t n = cloud.size();
  if (n < 4) throw Error(Errc::TooFewPoints, "a bagplot needs at least 4 points, got " + std::to_string(n));
  if (!(coef > 0.0) || !std::isfinite(coef)) throw Error(Errc::InvalidArgument, "bagplot coefficient must be positive");

  Bagplot out;
  out.fence = fence;
  out.coef = coef;
  const DepthContours contours(cloud);
  out.depths = contours.sample_depths();

  std::vector<DepthValue> sorted = out.depths;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t half = (n + 1) / 2;
  out.median_depth = sorted.front();
  out.bag_depth = sorted[half - 1];

  out.bag = contours.region(out.bag_depth);
  out.median = centroid(contours.deepest_region());
  const double tol = contours.tolerance();

  std::vector<bool> outlier(n, false);
  if (fence == FenceKind::Depth) {
    const double pm = static_cast<double>(out.median_depth);
    const double pb = static_cast<double>(out.bag_depth);
    const double level = pm - std::abs(pm - pb) * coef;
    out.fence_depth = level;
    const double cut = std::max(level, 0.0);
    for (std::size_t i = 0; i < n; ++i) outlier[i] = static_cast<double>(out.depths[i]) < cut;
  } else {
    out.fence_polygon = scaled_about(out.bag, out.median, coef);
    for (std::size_t i = 0; i < n; ++i) outlier[i] = !contains(out.fence_polygon, cloud.points[i], tol * std::max(1.0, coef));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (outlier[i])
      out.outlier_indices.push_back(i);
    else if (out.depths[i] >= out.bag_depth)
      out.bag_indices.push_back(i);
    else
      out.loop_indices.push_back(i);
  }
  return out;
}

MedianInterval bootstrap_tukey_median_ci(const PointCloud2D& cloud, std::size_t resamples, double gamma,
                                         std::uint64_t seed, double level) {
  const std::size_t n = cloud.size();
  if (resamples < 100) throw Error(Errc::TooFewResamples, "bootstrap needs at least 100 resamples");
  if (!(gamma >= 0.0)) throw Error(Errc::InvalidArgument, "smoothing fraction must be nonnegative");
  if (n == 0) throw Error(Errc::TooFewPoints, "bootstrap of an empty cloud");
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::InvalidArgument, "confidence level must be in (0,1)");

  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = cloud.points[i].x();
    ys[i] = cloud.points[i].y();
  }
  const Point2 noise_sd(gamma * sample_stddev(xs), gamma * sample_stddev(ys));

  std::vector<Point2> medians(resamples);
  parallel_for(resamples, [&](std::size_t b) {
    auto engine = stream_engine(seed, b);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PointCloud2D resample;
    resample.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Point2 p = cloud.points[pick(engine)];
      if (gamma > 0.0) {
        p.x() += noise_sd.x() * gauss(engine);
        p.y() += noise_sd.y() * gauss(engine);
      }
      resample.points.push_back(p);
    }
    medians[b] = tukey_median(resample);
  });

  const double lo_q = 0.5 * (1.0 - level);
  const double hi_q = 1.0 - lo_q;
  MedianInterval ci;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> values(resamples);
    for (std::size_t b = 0; b < resamples; ++b) values[b] = medians[b][c];
    ci.lower[c] = quantile_inplace(values, lo_q);
    ci.upper[c] = quantile_inplace(values, hi_q);
  }
  return ci;
}

void to_json(nlohmann::json& j, const ConvexPolygon& poly) {
  j = nlohmann::json::array();
  for (const auto& v : poly.vertices) j.push_back({v.x(), v.y()});
}

void to_json(nlohmann::json& j, const Bagplot& bagplot) {
  j = nlohmann::json::object();
  j["median"] = {bagplot.median.x(), bagplot.median.y()};
  j["bag"] = bagplot.bag;
  j["fence"] = bagplot.fence == FenceKind::Depth ? "depth" : "geometric";
  j["coef"] = bagplot.coef;
  j["median_depth"] = bagplot.median_depth;
  j["bag_depth"] = bagplot.bag_depth;
  j["fence_depth"] = bagplot.fence_depth ? nlohmann::json(*bagplot.fence_depth) : nlohmann::json(nullptr);
  if (bagplot.fence == FenceKind::Geometric) j["fence_polygon"] = bagplot.fence_polygon;
  j["bag_rule"] = "smallest depth region with at least ceil(n/2) points, no interpolation";
  j["depths"] = bagplot.depths;
  j["bag_indices"] = bagplot.bag_indices;
  j["loop_indices"] = bagplot.loop_indices;
  j["outlier_indices"] = bagplot.outlier_indices;
}

}  // namespace fundepth
