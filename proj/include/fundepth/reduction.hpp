#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "fundepth/curve_model.hpp"

namespace fundepth {

using Point2 = Eigen::Vector2d;

enum class PcaKind { Classical, Robust };

// Linear reduction model: scores = loadings * (x - center).
//
// For classical PCA `center` is the mean curve and var_ratios are eigenvalue
// fractions of the empirical covariance. For the robust variant `center` is
// the pointwise median curve and var_ratios are criterion-based: squared
// MAD of each direction over the squared-MAD total (see fit_robust_pca).
struct PcaModel {
  PcaKind kind = PcaKind::Classical;
  Eigen::VectorXd mean;
  RowMatrix loadings;  // p x m, orthonormal rows
  std::vector<double> var_ratios;
  std::optional<std::uint64_t> seed;

  std::size_t components() const noexcept { return static_cast<std::size_t>(loadings.rows()); }
  std::size_t points() const noexcept { return static_cast<std::size_t>(mean.size()); }
};

// n points in the plane, index-aligned with the curves they came from.
struct PointCloud2D {
  std::vector<Point2> points;

  std::size_t size() const noexcept { return points.size(); }
};

PcaModel fit_pca(const FunctionalSample& sample, std::size_t p);

// Projection-pursuit PCA maximizing, direction by direction, the MAD of the
// projected curves. Deterministic for a given seed.
struct RobustPcaOptions {
  std::size_t random_directions = 1000;
  std::size_t refinement_sweeps = 3;
};
PcaModel fit_robust_pca(const FunctionalSample& sample, std::size_t p, std::uint64_t seed,
                        const RobustPcaOptions& options = {});

// median_i |<x_i,u> - median_j <x_j,u>|, the robust spread along u.
double mad_criterion(const RowMatrix& data, const Eigen::VectorXd& direction);

// All p scores per curve (n x p).
RowMatrix scores(const PcaModel& model, const FunctionalSample& sample);

// The first two scores per curve.
PointCloud2D project(const PcaModel& model, const FunctionalSample& sample);

Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& scores);

// Reconstruction from 2D scores, remaining components set to zero.
Eigen::VectorXd reconstruct2(const PcaModel& model, const Point2& scores);

void to_json(nlohmann::json& j, const PcaModel& model);

}  // namespace fundepth
