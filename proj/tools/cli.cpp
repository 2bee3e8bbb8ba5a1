#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fundepth/banddepth.hpp"
#include "fundepth/curve_model.hpp"
#include "fundepth/error.hpp"
#include "fundepth/parallel.hpp"
#include "fundepth/pipeline.hpp"
#include "fundepth/reduction.hpp"
#include "fundepth/render.hpp"

namespace fundepth::cli {

namespace {

struct RunConfig {
  std::string method;
  std::string input;
  std::optional<std::size_t> truncate;
  std::size_t components = 2;
  bool robust = false;
  double alpha = 0.5;
  double factor = 1.5;
  double coef = 3.0;
  std::string fence = "depth";
  double outlier_alpha = 0.95;
  std::optional<std::size_t> n_outliers;
  std::size_t bootstrap = 500;
  double gamma = 0.05;
  std::uint64_t seed = 1;
  std::string bandwidth;
  bool snap_to_sample = false;
  std::string svg;
  std::string cloud_svg;
  std::string json;
  std::string csv;
  std::string depth_csv;
  unsigned threads = 0;
};

// "h11,h22" for a diagonal matrix or "h11,h12,h22" for a full one.
Eigen::Matrix2d parse_bandwidth(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "--bandwidth: not a number: '" + field + "'");
    }
  }
  Eigen::Matrix2d h;
  if (v.size() == 2)
    h << v[0], 0.0, 0.0, v[1];
  else if (v.size() == 3)
    h << v[0], v[1], v[1], v[2];
  else
    throw Error(Errc::InvalidArgument, "--bandwidth expects 2 or 3 comma-separated values");
  return h;
}

PipelineConfig pipeline_config(const RunConfig& rc) {
  PipelineConfig pc;
  pc.components = rc.components;
  pc.robust = rc.robust;
  pc.seed = rc.seed;
  pc.outlier_alpha = rc.outlier_alpha;
  pc.n_outliers = rc.n_outliers;
  if (!rc.bandwidth.empty()) pc.bandwidth = parse_bandwidth(rc.bandwidth);
  pc.snap_to_sample = rc.snap_to_sample;
  pc.coef = rc.coef;
  pc.fence = rc.fence == "geometric" ? FenceKind::Geometric : FenceKind::Depth;
  pc.alpha = rc.alpha;
  pc.factor = rc.factor;
  pc.bootstrap = rc.bootstrap;
  pc.gamma = rc.gamma;
  return pc;
}

nlohmann::json effective_config(const RunConfig& rc) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"method", rc.method},
          {"input", rc.input},
          {"truncate", opt(rc.truncate)},
          {"components", rc.components},
          {"robust", rc.robust},
          {"alpha", rc.alpha},
          {"factor", rc.factor},
          {"coef", rc.coef},
          {"fence", rc.fence},
          {"outlier_alpha", rc.outlier_alpha},
          {"n_outliers", opt(rc.n_outliers)},
          {"bootstrap", rc.bootstrap},
          {"gamma", rc.gamma},
          {"seed", rc.seed},
          {"bandwidth", rc.bandwidth.empty() ? nlohmann::json(nullptr) : nlohmann::json(rc.bandwidth)},
          {"snap_to_sample", rc.snap_to_sample}};
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::FileNotFound, "cannot open output file " + path);
  f << content;
  if (!f) throw Error(Errc::FileNotFound, "failed writing " + path);
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string summary_line(const RunConfig& rc, const FunctionalSample& sample, std::optional<std::size_t> outliers,
                         const std::optional<PcaModel>& model) {
  std::string line = "n=" + std::to_string(sample.size()) + " m=" + std::to_string(sample.points()) +
                     " method=" + rc.method;
  if (outliers) line += " outliers=" + std::to_string(*outliers);
  if (model) {
    double total = 0.0;
    for (double r : model->var_ratios) total += r;
    line += " explained_variance=" + fixed(total, 4);
  }
  return line;
}

int run_ensemble(const RunConfig& rc, const FunctionalSample& sample, std::ostream& out, std::ostream& err) {
  const PipelineConfig pc = pipeline_config(rc);
  EnsembleSummary summary = rc.method == "hdr"       ? run_hdr(sample, pc)
                            : rc.method == "bagplot" ? run_bagplot(sample, pc)
                                                     : run_band_depth(sample, pc);
  summary.metadata["config"] = effective_config(rc);
  for (const auto& w : summary.warnings) err << "warning: " << w << '\n';

  if (!rc.json.empty()) write_text(rc.json, summary_json(summary, sample).dump(2) + "\n");
  if (!rc.csv.empty()) {
    std::ostringstream s;
    write_envelope_csv(s, summary, sample);
    write_text(rc.csv, s.str());
  }
  if (!rc.depth_csv.empty()) {
    if (!summary.boxplot) throw Error(Errc::InvalidArgument, "--depth-csv is only available for fbplot and depth");
    std::ostringstream s;
    write_depth_csv(s, summary.boxplot->depths, sample);
    write_text(rc.depth_csv, s.str());
  }

  PlotSpec spec;
  if (!rc.svg.empty()) {
    spec.title = rc.method == "hdr" ? "HDR functional boxplot"
                 : rc.method == "bagplot" ? "Bagplot functional boxplot"
                                          : "Functional boxplot (band depth)";
    write_text(rc.svg, render_functional(summary, sample, spec));
  }
  if (!rc.cloud_svg.empty()) {
    if (!summary.cloud) throw Error(Errc::InvalidArgument, "--cloud-svg is only available for hdr and bagplot");
    CloudPlot plot;
    if (summary.hdr) {
      const Bandwidth h = pc.bandwidth ? Bandwidth(*pc.bandwidth) : scott_bandwidth(*summary.cloud);
      plot = hdr_cloud_plot(*summary.cloud, h, *summary.hdr, spec.palette);
      spec.title = "HDR in principal-component space";
    } else {
      plot = bagplot_cloud_plot(*summary.cloud, *summary.bagplot, spec.palette);
      spec.title = "Bagplot in principal-component space";
    }
    write_text(rc.cloud_svg, render_cloud(*summary.cloud, plot, spec));
  }

  out << summary_line(rc, sample, summary.indices_of(CurveClass::Outlier).size(), summary.model) << '\n';
  return kOk;
}

int run_pca(const RunConfig& rc, const FunctionalSample& sample, std::ostream& out) {
  const PcaModel model =
      rc.robust ? fit_robust_pca(sample, rc.components, rc.seed) : fit_pca(sample, rc.components);
  const RowMatrix s = scores(model, sample);
  if (!rc.json.empty()) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["method"] = "pca";
    j["n"] = sample.size();
    j["m"] = sample.points();
    j["labels"] = sample.labels();
    j["model"] = model;
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      rows.push_back(std::vector<double>(s.row(i).data(), s.row(i).data() + s.cols()));
    j["scores"] = std::move(rows);
    j["metadata"] = {{"config", effective_config(rc)}};
    write_text(rc.json, j.dump(2) + "\n");
  }
  if (!rc.csv.empty()) {
    std::ostringstream c;
    c << "label";
    for (std::size_t k = 0; k < model.components(); ++k) c << ",pc" << k + 1;
    c << '\n';
    char buf[40];
    for (std::size_t i = 0; i < sample.size(); ++i) {
      c << sample.labels()[i];
      for (Eigen::Index k = 0; k < s.cols(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", s(static_cast<Eigen::Index>(i), k));
        c << ',' << buf;
      }
      c << '\n';
    }
    write_text(rc.csv, c.str());
  }
  if (!rc.cloud_svg.empty() && model.components() >= 2) {
    const PointCloud2D cloud = project(model, sample);
    CloudPlot plot;
    plot.classes.assign(cloud.size(), CurveClass::Outer);
    PlotSpec spec;
    spec.title = "Principal-component scores";
    write_text(rc.cloud_svg, render_cloud(cloud, plot, spec));
  }
  out << summary_line(rc, sample, std::nullopt, model) << '\n';
  return kOk;
}

int run_depth(const RunConfig& rc, const FunctionalSample& sample, std::ostream& out) {
  const BandDepthResult depths = bd2_all(sample);
  std::ostringstream csv;
  write_depth_csv(csv, depths, sample);
  for (const auto& path : {rc.csv, rc.depth_csv})
    if (!path.empty()) write_text(path, csv.str());
  if (!rc.json.empty()) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["method"] = "depth";
    j["n"] = sample.size();
    j["m"] = sample.points();
    j["labels"] = sample.labels();
    j["depths"] = depths;
    j["median_label"] = sample.labels()[depths.ranking.front()];
    j["median_curve"] = median_curve(sample, depths);
    j["metadata"] = {{"config", effective_config(rc)}};
    write_text(rc.json, j.dump(2) + "\n");
  }
  out << summary_line(rc, sample, std::nullopt, std::nullopt)
      << " median=" << sample.labels()[depths.ranking.front()] << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Depth-based summaries of curve ensembles", "fundepth"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");

  app.add_option("-i,--input", rc.input, "CSV file: grid row, then one curve per row")->required();
  app.add_option("--truncate", rc.truncate, "Keep only the first k grid points")->check(CLI::PositiveNumber);
  app.add_option("-p,--components", rc.components, "Number of principal components")->check(CLI::PositiveNumber);
  app.add_flag("--robust", rc.robust, "Use MAD projection-pursuit PCA");
  app.add_option("--alpha", rc.alpha, "Central-region proportion (functional boxplot)")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--factor", rc.factor, "Envelope inflation factor (functional boxplot)")
      ->check(CLI::PositiveNumber);
  app.add_option("--coef", rc.coef, "Bagplot fence coefficient")->check(CLI::PositiveNumber);
  app.add_option("--fence", rc.fence, "Bagplot fence: depth or geometric")
      ->check(CLI::IsMember({"depth", "geometric"}));
  app.add_option("--outlier-alpha", rc.outlier_alpha, "HDR coverage beyond which points are outliers")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--n-outliers", rc.n_outliers, "HDR: flag exactly the k lowest-density curves");
  app.add_option("--bootstrap", rc.bootstrap, "Bootstrap resamples for the median interval (0 disables)");
  app.add_option("--gamma", rc.gamma, "Bootstrap smoothing noise, as a fraction of the spread")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", rc.seed, "Seed for every randomized step");
  app.add_option("--bandwidth", rc.bandwidth, "HDR bandwidth as h11,h22 or h11,h12,h22 (default: Scott)");
  app.add_flag("--snap-to-sample", rc.snap_to_sample, "HDR: report the highest-density sample curve");
  app.add_option("--svg", rc.svg, "Write the functional-space SVG here");
  app.add_option("--cloud-svg", rc.cloud_svg, "Write the score-space SVG here");
  app.add_option("--json", rc.json, "Write the JSON summary here");
  app.add_option("--csv", rc.csv, "Write envelopes (or depths/scores) as CSV here");
  app.add_option("--depth-csv", rc.depth_csv, "Write band depths and ranks as CSV here");
  app.add_option("--threads", rc.threads, "Worker cap, 0 = all cores")->envname("FUNDEPTH_THREADS");

  for (const char* name : {"hdr", "bagplot", "fbplot", "pca", "depth"}) app.add_subcommand(name)->fallthrough();
  app.get_subcommand("hdr")->description("PCA scores + highest density regions");
  app.get_subcommand("bagplot")->description("PCA scores + Tukey-depth bagplot");
  app.get_subcommand("fbplot")->description("Band-depth functional boxplot");
  app.get_subcommand("pca")->description("Principal component scores only");
  app.get_subcommand("depth")->description("Band depth and ranking of every curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsageError;
  }
  rc.method = app.get_subcommands().front()->get_name();

  try {
    set_max_threads(rc.threads);
    FunctionalSample sample = load_curves(rc.input);
    if (rc.truncate) sample = truncate(sample, *rc.truncate);
    err << "loaded " << sample.size() << " curves x " << sample.points() << " points from " << rc.input << '\n';
    if (rc.method == "pca") return run_pca(rc, sample, out);
    if (rc.method == "depth") return run_depth(rc, sample, out);
    return run_ensemble(rc, sample, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::Input: return kInputError;
      case ErrorCategory::Usage: return kUsageError;
      case ErrorCategory::Numerical: return kNumericalError;
    }
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace fundepth::cli
