#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fundepth/curve_model.hpp"
#include "fundepth/density.hpp"
#include "fundepth/geometry.hpp"
#include "fundepth/halfspace.hpp"
#include "fundepth/pipeline.hpp"

namespace fundepth {

struct Palette {
  std::string central = "#555555";
  std::string outer = "#cccccc";
  std::string median = "#000000";
  std::string ci = "#000000";
  std::vector<std::string> outliers = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                                       "#ff7f00", "#a65628", "#f781bf", "#17becf"};

  const std::string& outlier(std::size_t k) const { return outliers[k % outliers.size()]; }
};

struct PlotSpec {
  int width = 800;
  int height = 500;
  int margin_left = 70;
  int margin_right = 150;
  int margin_top = 40;
  int margin_bottom = 50;
  std::string title;
  std::string x_label = "time (s)";
  std::string y_label = "value";
  Palette palette;
};

// A filled layer of the score-space plot. Layers are painted in order.
struct CloudLayer {
  std::string name;
  std::string fill;
  std::vector<std::vector<Point2>> polygons;
};

struct CloudPlot {
  std::vector<CloudLayer> layers;
  std::vector<CurveClass> classes;  // index-aligned with the cloud
  std::optional<Point2> marker;     // median or mode
  std::string marker_label;
};

// Filled 95% and 50% density regions on a 64x64 cell raster, then the mode.
CloudPlot hdr_cloud_plot(const PointCloud2D& cloud, const Bandwidth& h, const HdrResult& hdr,
                         const Palette& palette = {});

// Loop (hull of the non-outliers) then bag, then the Tukey median.
CloudPlot bagplot_cloud_plot(const PointCloud2D& cloud, const Bagplot& bagplot, const Palette& palette = {});

// Standalone SVG 1.1 scatter of the score cloud over the given layers.
std::string render_cloud(const PointCloud2D& cloud, const CloudPlot& plot, const PlotSpec& spec);

// Functional-space summary: non-outlier band, central band, outlier curves,
// dotted interval curves and the median curve, with a legend.
std::string render_functional(const EnsembleSummary& summary, const FunctionalSample& sample, const PlotSpec& spec);

// Axis range covering [lo, hi] with 5% padding on both sides.
std::array<double, 2> padded_range(double lo, double hi);

}  // namespace fundepth
