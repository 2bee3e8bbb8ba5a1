#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fundepth/curve_model.hpp"

namespace fundepth {

// Closed containment of y in the band spanned by yi and yj at every point.
bool band_contains(std::span<const double> y, std::span<const double> yi, std::span<const double> yj);

// Band depth with two-curve bands. `counts[i]` is the exact number of pairs
// {j < k} whose band contains curve i; depths[i] = counts[i] / pairs.
struct BandDepthResult {
  std::vector<std::uint64_t> counts;
  std::uint64_t pairs = 0;
  std::vector<double> depths;
  std::vector<std::size_t> ranking;  // deepest first, ties by ascending index
};

BandDepthResult bd2_all(const FunctionalSample& sample);
BandDepthResult bd2_all(const RowMatrix& curves);

// The deepest curve, or the pointwise average of all curves tied at the top.
Curve median_curve(const FunctionalSample& sample, const BandDepthResult& depths);
Curve median_curve(const RowMatrix& curves, const BandDepthResult& depths);

struct Envelope {
  Curve lower;
  Curve upper;
};

// Pointwise min/max of the given rows.
Envelope envelope_of(const RowMatrix& curves, std::span<const std::size_t> rows);

// Envelope of the ceil(alpha*n) deepest curves.
Envelope central_region(const FunctionalSample& sample, const BandDepthResult& depths, double alpha);

struct FunctionalBoxplot {
  Curve median_curve;
  Envelope central;
  Envelope fence;
  Envelope nonoutlier;
  std::vector<std::size_t> central_indices;
  std::vector<std::size_t> outlier_indices;
  double alpha = 0.5;
  double factor = 1.5;
  BandDepthResult depths;
};

// Fences sit factor * (central height) outside the central region; a curve
// leaving them at any grid point is an outlier.
FunctionalBoxplot functional_boxplot(const FunctionalSample& sample, double alpha = 0.5, double factor = 1.5);

// Pointwise bootstrap interval of the band-depth median curve. Each resample
// draws n curves with replacement and adds Gaussian noise with pointwise
// sd gamma * sd(t).
Envelope bootstrap_median_ci(const FunctionalSample& sample, std::size_t resamples = 500, double gamma = 0.05,
                             std::uint64_t seed = 1, double level = 0.95);

void to_json(nlohmann::json& j, const BandDepthResult& result);
void to_json(nlohmann::json& j, const Envelope& envelope);
void to_json(nlohmann::json& j, const FunctionalBoxplot& boxplot);

}  // namespace fundepth
