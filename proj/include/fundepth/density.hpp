#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fundepth/curve_model.hpp"
#include "fundepth/reduction.hpp"

namespace fundepth {

// Symmetric positive-definite 2x2 smoothing matrix, in squared score units.
class Bandwidth {
 public:
  // Throws SingularBandwidth unless the matrix is symmetric positive definite.
  explicit Bandwidth(const Eigen::Matrix2d& h);

  static Bandwidth diagonal(double h11, double h22) {
    Eigen::Matrix2d m;
    m << h11, 0.0, 0.0, h22;
    return Bandwidth(m);
  }

  const Eigen::Matrix2d& matrix() const noexcept { return h_; }
  const Eigen::Matrix2d& inverse() const noexcept { return inv_; }
  double determinant() const noexcept { return det_; }
  double max_eigenvalue() const noexcept { return max_eig_; }

 private:
  Eigen::Matrix2d h_;
  Eigen::Matrix2d inv_;
  double det_ = 0.0;
  double max_eig_ = 0.0;
};

// Scott's rule for two dimensions: H = diag((n^(-1/3) sigma_k)^2).
Bandwidth scott_bandwidth(const PointCloud2D& cloud);

// Gaussian kernel density estimate at each query, summed in point-index order.
std::vector<double> kde_eval(const PointCloud2D& cloud, const Bandwidth& h, std::span<const Point2> queries);
double kde_eval(const PointCloud2D& cloud, const Bandwidth& h, const Point2& query);

// Density thresholds f_alpha: the ceil(alpha*n)-th largest sample-point
// density, so that about alpha*n sample points satisfy f(X_i) >= f_alpha.
std::map<double, double> hdr_thresholds(const PointCloud2D& cloud, const Bandwidth& h, std::span<const double> alphas);
double density_threshold(std::span<const double> densities, double alpha);

// Global mode: best node of a 256x256 grid over the cloud's bounding box
// (padded by 3 sqrt(max eig H)), refined by 50 mean-shift steps.
Point2 hdr_mode(const PointCloud2D& cloud, const Bandwidth& h);

// Number of separated local maxima of the density on the mode grid whose
// height is at least `relative_height` of the global maximum.
std::size_t count_modes(const PointCloud2D& cloud, const Bandwidth& h, double relative_height = 0.1);

struct HdrResult {
  std::map<double, double> thresholds;  // coverage alpha -> density level
  Point2 mode = Point2::Zero();
  double mode_density = 0.0;
  std::vector<CurveClass> classes;
  std::vector<double> density_at_points;
  double outlier_alpha = 0.95;
  std::optional<std::size_t> n_outliers;
};

// Central: f >= f_0.5; Outer: f_outlier_alpha <= f < f_0.5; Outlier otherwise.
// With n_outliers set, the n_outliers lowest-density points are the outliers
// instead (ties broken by lower index first).
HdrResult hdr_classify(const PointCloud2D& cloud, const Bandwidth& h, double outlier_alpha = 0.95,
                       std::optional<std::size_t> n_outliers = std::nullopt);

void to_json(nlohmann::json& j, const Bandwidth& h);
void to_json(nlohmann::json& j, const HdrResult& result);

}  // namespace fundepth
