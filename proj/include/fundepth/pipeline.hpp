#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fundepth/banddepth.hpp"
#include "fundepth/curve_model.hpp"
#include "fundepth/density.hpp"
#include "fundepth/halfspace.hpp"
#include "fundepth/reduction.hpp"

namespace fundepth {

inline constexpr int kSchemaVersion = 1;

struct PipelineConfig {
  // reduction
  std::size_t components = 2;
  bool robust = false;
  std::uint64_t seed = 1;
  // HDR
  double outlier_alpha = 0.95;
  std::optional<std::size_t> n_outliers;
  std::optional<Eigen::Matrix2d> bandwidth;  // Scott's rule when unset
  bool snap_to_sample = false;
  // bagplot
  double coef = 3.0;
  FenceKind fence = FenceKind::Depth;
  // functional boxplot
  double alpha = 0.5;
  double factor = 1.5;
  // bootstrap of the median; 0 resamples disables the interval
  std::size_t bootstrap = 500;
  double gamma = 0.05;
};

struct EnsembleSummary {
  Method method = Method::BandDepth;
  std::vector<CurveClass> classes;
  Curve center_curve;
  Envelope central_envelope;
  Envelope nonoutlier_envelope;
  std::optional<Envelope> ci_band;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<std::string> warnings;

  // Method-specific intermediate results, kept for plotting and reporting.
  std::optional<PcaModel> model;
  std::optional<PointCloud2D> cloud;
  std::optional<HdrResult> hdr;
  std::optional<Bagplot> bagplot;
  std::optional<FunctionalBoxplot> boxplot;

  std::vector<std::size_t> indices_of(CurveClass c) const;
};

EnsembleSummary run_hdr(const FunctionalSample& sample, const PipelineConfig& config = {});
EnsembleSummary run_bagplot(const FunctionalSample& sample, const PipelineConfig& config = {});
EnsembleSummary run_band_depth(const FunctionalSample& sample, const PipelineConfig& config = {});

// Versioned summary document (schema_version 1).
nlohmann::json summary_json(const EnsembleSummary& summary, const FunctionalSample& sample);

// t, center, central and non-outlier envelopes, and the interval when present.
void write_envelope_csv(std::ostream& out, const EnsembleSummary& summary, const FunctionalSample& sample);

// label, depth, rank (1 = deepest).
void write_depth_csv(std::ostream& out, const BandDepthResult& depths, const FunctionalSample& sample);

}  // namespace fundepth
