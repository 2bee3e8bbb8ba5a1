#include "fundepth/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fundepth/error.hpp"
#include "fundepth/parallel.hpp"
#include "fundepth/stats.hpp"

namespace fundepth {

namespace {

constexpr std::size_t kGridSize = 256;
constexpr int kMeanShiftSteps = 50;

struct DensityGrid {
  Point2 origin = Point2::Zero();
  Point2 step = Point2::Zero();
  std::vector<double> values;  // row-major, kGridSize x kGridSize, row = y index

  Point2 node(std::size_t ix, std::size_t iy) const {
    return origin + Point2(step.x() * static_cast<double>(ix), step.y() * static_cast<double>(iy));
  }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * kGridSize + ix]; }
};

DensityGrid density_grid(const PointCloud2D& cloud, const Bandwidth& h) {
  Point2 lo = cloud.points.front();
  Point2 hi = lo;
  for (const auto& p : cloud.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double pad = 3.0 * std::sqrt(h.max_eigenvalue());
  lo.array() -= pad;
  hi.array() += pad;
  DensityGrid grid;
  grid.origin = lo;
  grid.step = (hi - lo) / static_cast<double>(kGridSize - 1);
  grid.values.assign(kGridSize * kGridSize, 0.0);
  parallel_for(kGridSize, [&](std::size_t iy) {
    std::vector<Point2> row(kGridSize);
    for (std::size_t ix = 0; ix < kGridSize; ++ix) row[ix] = grid.node(ix, iy);
    const std::vector<double> f = kde_eval(cloud, h, row);
    std::copy(f.begin(), f.end(), grid.values.begin() + static_cast<std::ptrdiff_t>(iy * kGridSize));
  });
  return grid;
}

void check_cloud(const PointCloud2D& cloud) {
  if (cloud.size() == 0) throw Error(Errc::TooFewPoints, "density of an empty cloud");
}

}  // namespace

Bandwidth::Bandwidth(const Eigen::Matrix2d& h) : h_(h) {
  if (!h.allFinite()) throw Error(Errc::SingularBandwidth, "bandwidth has non-finite entries");
  const double scale = std::max(std::abs(h(0, 1)), std::abs(h(1, 0)));
  if (std::abs(h(0, 1) - h(1, 0)) > 1e-12 * std::max(scale, 1.0))
    throw Error(Errc::SingularBandwidth, "bandwidth matrix is not symmetric");
  h_(1, 0) = h_(0, 1);
  det_ = h_(0, 0) * h_(1, 1) - h_(0, 1) * h_(0, 1);
  if (!(h_(0, 0) > 0.0) || !(det_ > 0.0))
    throw Error(Errc::SingularBandwidth, "bandwidth matrix is not positive definite");
  inv_ << h_(1, 1) / det_, -h_(0, 1) / det_, -h_(0, 1) / det_, h_(0, 0) / det_;
  const double half_trace = 0.5 * (h_(0, 0) + h_(1, 1));
  max_eig_ = half_trace + std::sqrt(std::max(0.0, half_trace * half_trace - det_));
}

Bandwidth scott_bandwidth(const PointCloud2D& cloud) {
  const std::size_t n = cloud.size();
  if (n < 2) throw Error(Errc::DegenerateCloud, "Scott's rule needs at least 2 points");
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = cloud.points[i].x();
    ys[i] = cloud.points[i].y();
  }
  const double sx = sample_stddev(xs);
  const double sy = sample_stddev(ys);
  if (!(sx > 0.0) || !(sy > 0.0)) throw Error(Errc::DegenerateCloud, "a cloud coordinate has zero variance");
  const double factor = std::pow(static_cast<double>(n), -1.0 / 3.0);
  return Bandwidth::diagonal((factor * sx) * (factor * sx), (factor * sy) * (factor * sy));
}

std::vector<double> kde_eval(const PointCloud2D& cloud, const Bandwidth& h, std::span<const Point2> queries) {
  check_cloud(cloud);
  const Eigen::Matrix2d& inv = h.inverse();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(h.determinant()) * static_cast<double>(cloud.size()));
  std::vector<double> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double sum = 0.0;
    for (const auto& p : cloud.points) {
      const double dx = queries[q].x() - p.x();
      const double dy = queries[q].y() - p.y();
      const double quad = inv(0, 0) * dx * dx + 2.0 * inv(0, 1) * dx * dy + inv(1, 1) * dy * dy;
      sum += std::exp(-0.5 * quad);
    }
    out[q] = sum * norm;
  }
  return out;
}

double kde_eval(const PointCloud2D& cloud, const Bandwidth& h, const Point2& query) {
  return kde_eval(cloud, h, std::span<const Point2>(&query, 1)).front();
}

double density_threshold(std::span<const double> densities, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidArgument, "coverage level must be in (0,1)");
  if (densities.empty()) throw Error(Errc::TooFewPoints, "no densities");
  std::vector<double> sorted(densities.begin(), densities.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted[coverage_count(alpha, sorted.size()) - 1];
}

std::map<double, double> hdr_thresholds(const PointCloud2D& cloud, const Bandwidth& h, std::span<const double> alphas) {
  const std::vector<double> f = kde_eval(cloud, h, cloud.points);
  std::map<double, double> out;
  for (double alpha : alphas) out[alpha] = density_threshold(f, alpha);
  return out;
}

Point2 hdr_mode(const PointCloud2D& cloud, const Bandwidth& h) {
  check_cloud(cloud);
  const DensityGrid grid = density_grid(cloud, h);
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.values.size(); ++k)
    if (grid.values[k] > grid.values[best]) best = k;
  Point2 start = grid.node(best % kGridSize, best / kGridSize);
  double start_f = grid.values[best];

  // A sample point can beat every grid node; start from whichever is higher.
  const std::vector<double> at_points = kde_eval(cloud, h, cloud.points);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (at_points[i] > start_f) {
      start_f = at_points[i];
      start = cloud.points[i];
    }

  const Eigen::Matrix2d& inv = h.inverse();
  Point2 x = start;
  Point2 best_x = start;
  double best_f = start_f;
  for (int step = 0; step < kMeanShiftSteps; ++step) {
    Point2 num = Point2::Zero();
    double den = 0.0;
    for (const auto& p : cloud.points) {
      const Point2 d = x - p;
      const double w = std::exp(-0.5 * d.dot(inv * d));
      num += w * p;
      den += w;
    }
    if (!(den > 0.0)) break;
    x = num / den;
    const double f = kde_eval(cloud, h, x);
    if (f > best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

std::size_t count_modes(const PointCloud2D& cloud, const Bandwidth& h, double relative_height) {
  check_cloud(cloud);
  const DensityGrid grid = density_grid(cloud, h);
  const double top = *std::max_element(grid.values.begin(), grid.values.end());
  std::size_t modes = 0;
  for (std::size_t iy = 0; iy < kGridSize; ++iy)
    for (std::size_t ix = 0; ix < kGridSize; ++ix) {
      const double v = grid.at(ix, iy);
      if (v < relative_height * top) continue;
      bool peak = true;
      for (int dy = -1; dy <= 1 && peak; ++dy)
        for (int dx = -1; dx <= 1 && peak; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const auto nx = static_cast<std::ptrdiff_t>(ix) + dx;
          const auto ny = static_cast<std::ptrdiff_t>(iy) + dy;
          if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(kGridSize) ||
              ny >= static_cast<std::ptrdiff_t>(kGridSize))
            continue;
          const double w = grid.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
          // Plateaus count once: ties only against earlier neighbours.
          if (w > v || (w == v && (dy < 0 || (dy == 0 && dx < 0)))) peak = false;
        }
      if (peak) ++modes;
    }
  return modes;
}

HdrResult hdr_classify(const PointCloud2D& cloud, const Bandwidth& h, double outlier_alpha,
                       std::optional<std::size_t> n_outliers) {
  check_cloud(cloud);
  if (!(outlier_alpha > 0.0 && outlier_alpha < 1.0))
    throw Error(Errc::InvalidArgument, "outlier coverage must be in (0,1)");
  const std::size_t n = cloud.size();
  if (n_outliers && *n_outliers > n)
    throw Error(Errc::InvalidArgument, "cannot flag more outliers than points");

  HdrResult result;
  result.outlier_alpha = outlier_alpha;
  result.n_outliers = n_outliers;
  result.density_at_points = kde_eval(cloud, h, cloud.points);
  const auto& f = result.density_at_points;
  result.thresholds[0.5] = density_threshold(f, 0.5);
  result.thresholds[outlier_alpha] = density_threshold(f, outlier_alpha);
  const double central = result.thresholds.at(0.5);
  const double outer = result.thresholds.at(outlier_alpha);

  result.classes.assign(n, CurveClass::Outer);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] >= central)
      result.classes[i] = CurveClass::Central;
    else if (!n_outliers && f[i] < outer)
      result.classes[i] = CurveClass::Outlier;
  }
  if (n_outliers) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    for (std::size_t k = 0; k < *n_outliers; ++k) result.classes[order[k]] = CurveClass::Outlier;
  }
  result.mode = hdr_mode(cloud, h);
  result.mode_density = kde_eval(cloud, h, result.mode);
  return result;
}

void to_json(nlohmann::json& j, const Bandwidth& h) {
  const auto& m = h.matrix();
  j = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

void to_json(nlohmann::json& j, const HdrResult& result) {
  j = nlohmann::json::object();
  auto thresholds = nlohmann::json::array();
  for (const auto& [alpha, level] : result.thresholds) thresholds.push_back({{"coverage", alpha}, {"density", level}});
  j["thresholds"] = std::move(thresholds);
  j["threshold_rule"] = "sample quantile: ceil(alpha*n)-th largest sample-point density";
  j["mode"] = {result.mode.x(), result.mode.y()};
  j["mode_density"] = result.mode_density;
  j["outlier_alpha"] = result.outlier_alpha;
  j["n_outliers"] = result.n_outliers ? nlohmann::json(*result.n_outliers) : nlohmann::json(nullptr);
  auto classes = nlohmann::json::array();
  for (auto c : result.classes) classes.push_back(std::string(to_string(c)));
  j["classes"] = std::move(classes);
  j["density_at_points"] = result.density_at_points;
}

}  // namespace fundepth
