#include "fundepth/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "fundepth/error.hpp"

namespace fundepth {

namespace {

Curve to_curve(const Eigen::VectorXd& v) { return Curve(v.data(), v.data() + v.size()); }

PcaModel reduce(const FunctionalSample& sample, const PipelineConfig& config) {
  if (config.components < 2)
    throw Error(Errc::KOutOfRange, "the 2D methods need at least 2 components");
  return config.robust ? fit_robust_pca(sample, config.components, config.seed)
                       : fit_pca(sample, config.components);
}

void fill_envelopes(EnsembleSummary& summary, const FunctionalSample& sample) {
  std::vector<std::size_t> central;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < summary.classes.size(); ++i) {
    if (summary.classes[i] == CurveClass::Central) central.push_back(i);
    if (summary.classes[i] != CurveClass::Outlier) kept.push_back(i);
  }
  summary.central_envelope = envelope_of(sample.values(), central);
  summary.nonoutlier_envelope = envelope_of(sample.values(), kept);
}

nlohmann::json reduction_metadata(const PcaModel& model) {
  double cumulative = 0.0;
  for (double r : model.var_ratios) cumulative += r;
  return {{"kind", model.kind == PcaKind::Classical ? "classical" : "robust"},
          {"components", model.components()},
          {"var_ratios", model.var_ratios},
          {"explained_variance", cumulative},
          {"explained_variance_2d", model.var_ratios[0] + model.var_ratios[1]},
          {"var_ratio_basis", model.kind == PcaKind::Classical ? "covariance_eigenvalue" : "mad_criterion"}};
}

}  // namespace

std::vector<std::size_t> EnsembleSummary::indices_of(CurveClass c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == c) out.push_back(i);
  return out;
}

EnsembleSummary run_hdr(const FunctionalSample& sample, const PipelineConfig& config) {
  EnsembleSummary summary;
  summary.method = Method::HDR;
  PcaModel model = reduce(sample, config);
  PointCloud2D cloud = project(model, sample);
  const Bandwidth h = config.bandwidth ? Bandwidth(*config.bandwidth) : scott_bandwidth(cloud);
  HdrResult hdr = hdr_classify(cloud, h, config.outlier_alpha, config.n_outliers);
  summary.classes = hdr.classes;

  if (config.snap_to_sample) {
    const auto& f = hdr.density_at_points;
    const auto best = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
    const auto c = sample.curve(best);
    summary.center_curve.assign(c.begin(), c.end());
  } else {
    summary.center_curve = to_curve(reconstruct2(model, hdr.mode));
  }
  fill_envelopes(summary, sample);

  const std::size_t modes = count_modes(cloud, h);
  if (modes > 1)
    summary.warnings.push_back("density estimate has " + std::to_string(modes) +
                               " separated modes; the single global mode may not represent the ensemble");

  summary.metadata = {
      {"reduction", reduction_metadata(model)},
      {"bandwidth", h},
      {"bandwidth_rule", config.bandwidth ? "user" : "scott_diagonal"},
      {"outlier_alpha", config.outlier_alpha},
      {"n_outliers", config.n_outliers ? nlohmann::json(*config.n_outliers) : nlohmann::json(nullptr)},
      {"threshold_rule", "sample quantile of sample-point densities"},
      {"center", config.snap_to_sample ? "highest_density_sample_curve" : "reconstructed_mode"},
      {"modes_detected", modes},
      {"seed", config.seed},
  };
  summary.model = std::move(model);
  summary.cloud = std::move(cloud);
  summary.hdr = std::move(hdr);
  return summary;
}

EnsembleSummary run_bagplot(const FunctionalSample& sample, const PipelineConfig& config) {
  EnsembleSummary summary;
  summary.method = Method::Bagplot;
  PcaModel model = reduce(sample, config);
  PointCloud2D cloud = project(model, sample);
  Bagplot bp = build_bagplot(cloud, config.coef, config.fence);

  summary.classes.assign(sample.size(), CurveClass::Outer);
  for (std::size_t i : bp.bag_indices) summary.classes[i] = CurveClass::Central;
  for (std::size_t i : bp.outlier_indices) summary.classes[i] = CurveClass::Outlier;
  summary.center_curve = to_curve(reconstruct2(model, bp.median));
  fill_envelopes(summary, sample);

  if (config.bootstrap > 0) {
    const MedianInterval ci = bootstrap_tukey_median_ci(cloud, config.bootstrap, config.gamma, config.seed);
    const Point2 corners[4] = {ci.lower, {ci.lower.x(), ci.upper.y()}, {ci.upper.x(), ci.lower.y()}, ci.upper};
    Envelope band;
    for (const auto& corner : corners) {
      const Curve c = to_curve(reconstruct2(model, corner));
      if (band.lower.empty()) {
        band.lower = c;
        band.upper = c;
        continue;
      }
      for (std::size_t t = 0; t < c.size(); ++t) {
        band.lower[t] = std::min(band.lower[t], c[t]);
        band.upper[t] = std::max(band.upper[t], c[t]);
      }
    }
    summary.ci_band = std::move(band);
  }

  summary.metadata = {
      {"reduction", reduction_metadata(model)},
      {"coef", config.coef},
      {"fence", config.fence == FenceKind::Depth ? "depth" : "geometric"},
      {"fence_depth", bp.fence_depth ? nlohmann::json(*bp.fence_depth) : nlohmann::json(nullptr)},
      {"median_depth", bp.median_depth},
      {"bag_depth", bp.bag_depth},
      {"bag_rule", "smallest depth region with at least ceil(n/2) points, no interpolation"},
      {"bootstrap", config.bootstrap},
      {"gamma", config.gamma},
      {"ci_level", 0.95},
      {"ci_mapping", "approximate: pointwise min/max of the reconstructed corners of the score-space median interval"},
      {"seed", config.seed},
  };
  summary.model = std::move(model);
  summary.cloud = std::move(cloud);
  summary.bagplot = std::move(bp);
  return summary;
}

EnsembleSummary run_band_depth(const FunctionalSample& sample, const PipelineConfig& config) {
  EnsembleSummary summary;
  summary.method = Method::BandDepth;
  FunctionalBoxplot box = functional_boxplot(sample, config.alpha, config.factor);

  summary.classes.assign(sample.size(), CurveClass::Outer);
  for (std::size_t i : box.central_indices) summary.classes[i] = CurveClass::Central;
  for (std::size_t i : box.outlier_indices) summary.classes[i] = CurveClass::Outlier;
  summary.center_curve = box.median_curve;
  summary.central_envelope = box.central;
  summary.nonoutlier_envelope = box.nonoutlier;
  if (config.bootstrap > 0)
    summary.ci_band = bootstrap_median_ci(sample, config.bootstrap, config.gamma, config.seed);

  summary.metadata = {
      {"alpha", config.alpha},
      {"factor", config.factor},
      {"central_rule", "envelope of the ceil(alpha*n) deepest curves, ties by ascending index"},
      {"bootstrap", config.bootstrap},
      {"gamma", config.gamma},
      {"ci_level", 0.95},
      {"seed", config.seed},
  };
  summary.boxplot = std::move(box);
  return summary;
}

nlohmann::json summary_json(const EnsembleSummary& summary, const FunctionalSample& sample) {
  nlohmann::json j = nlohmann::json::object();
  j["schema_version"] = kSchemaVersion;
  j["method"] = to_string(summary.method);
  j["n"] = sample.size();
  j["m"] = sample.points();
  j["grid"] = std::vector<double>(sample.grid().begin(), sample.grid().end());
  j["labels"] = sample.labels();
  auto classes = nlohmann::json::array();
  for (auto c : summary.classes) classes.push_back(std::string(to_string(c)));
  j["classes"] = std::move(classes);
  j["counts"] = {{"central", summary.indices_of(CurveClass::Central).size()},
                 {"outer", summary.indices_of(CurveClass::Outer).size()},
                 {"outlier", summary.indices_of(CurveClass::Outlier).size()}};
  auto outliers = nlohmann::json::array();
  for (std::size_t i : summary.indices_of(CurveClass::Outlier)) outliers.push_back(sample.labels()[i]);
  j["outliers"] = std::move(outliers);
  j["center_curve"] = summary.center_curve;
  j["central_envelope"] = summary.central_envelope;
  j["nonoutlier_envelope"] = summary.nonoutlier_envelope;
  j["ci_band"] = summary.ci_band ? nlohmann::json(*summary.ci_band) : nlohmann::json(nullptr);
  j["metadata"] = summary.metadata;
  j["warnings"] = summary.warnings;

  nlohmann::json details = nlohmann::json::object();
  if (summary.cloud) {
    auto points = nlohmann::json::array();
    for (const auto& p : summary.cloud->points) points.push_back({p.x(), p.y()});
    details["scores"] = std::move(points);
  }
  if (summary.hdr) details["hdr"] = *summary.hdr;
  if (summary.bagplot) details["bagplot"] = *summary.bagplot;
  if (summary.boxplot) details["boxplot"] = *summary.boxplot;
  j["details"] = std::move(details);
  return j;
}

void write_envelope_csv(std::ostream& out, const EnsembleSummary& summary, const FunctionalSample& sample) {
  out << "t,center,central_lower,central_upper,nonoutlier_lower,nonoutlier_upper";
  if (summary.ci_band) out << ",ci_lower,ci_upper";
  out << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (std::size_t t = 0; t < sample.points(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", sample.grid()[t]);
    out << buf;
    put(summary.center_curve[t]);
    put(summary.central_envelope.lower[t]);
    put(summary.central_envelope.upper[t]);
    put(summary.nonoutlier_envelope.lower[t]);
    put(summary.nonoutlier_envelope.upper[t]);
    if (summary.ci_band) {
      put(summary.ci_band->lower[t]);
      put(summary.ci_band->upper[t]);
    }
    out << '\n';
  }
}

void write_depth_csv(std::ostream& out, const BandDepthResult& depths, const FunctionalSample& sample) {
  std::vector<std::size_t> rank(depths.ranking.size());
  for (std::size_t r = 0; r < depths.ranking.size(); ++r) rank[depths.ranking[r]] = r + 1;
  out << "label,depth,rank\n";
  char buf[40];
  for (std::size_t i = 0; i < sample.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", depths.depths[i]);
    out << sample.labels()[i] << ',' << buf << ',' << rank[i] << '\n';
  }
}

}  // namespace fundepth
