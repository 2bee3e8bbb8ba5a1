#include "fundepth/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fundepth/error.hpp"

namespace fundepth {

namespace {

std::string fmt3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  // Avoid "-0.000" so equal geometry always prints identically.
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    step = mult * mag;
    if (span / step <= target) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

struct Bounds {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -std::numeric_limits<double>::infinity();
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
};

// Data-to-pixel mapping over the plot area.
class Frame {
 public:
  Frame(const PlotSpec& spec, const Bounds& b)
      : spec_(spec), x_(padded_range(b.x_lo, b.x_hi)), y_(padded_range(b.y_lo, b.y_hi)) {
    if (spec.width <= spec.margin_left + spec.margin_right || spec.height <= spec.margin_top + spec.margin_bottom)
      throw Error(Errc::InvalidArgument, "plot dimensions leave no drawing area");
  }

  double px(double x) const {
    const double w = spec_.width - spec_.margin_left - spec_.margin_right;
    return spec_.margin_left + (x - x_[0]) / (x_[1] - x_[0]) * w;
  }
  double py(double y) const {
    const double h = spec_.height - spec_.margin_top - spec_.margin_bottom;
    return spec_.height - spec_.margin_bottom - (y - y_[0]) / (y_[1] - y_[0]) * h;
  }
  std::string xy(double x, double y) const { return fmt3(px(x)) + "," + fmt3(py(y)); }

  const std::array<double, 2>& x_range() const { return x_; }
  const std::array<double, 2>& y_range() const { return y_; }

 private:
  const PlotSpec& spec_;
  std::array<double, 2> x_;
  std::array<double, 2> y_;
};

void open_document(std::ostringstream& svg, const PlotSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw Error(Errc::InvalidArgument, "plot dimensions must be positive");
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"#ffffff\"/>\n";
  if (!spec.title.empty())
    svg << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape_xml(spec.title) << "</text>\n";
}

void draw_axes(std::ostringstream& svg, const PlotSpec& spec, const Frame& frame, const std::string& x_label,
               const std::string& y_label) {
  const double left = spec.margin_left;
  const double right = spec.width - spec.margin_right;
  const double top = spec.margin_top;
  const double bottom = spec.height - spec.margin_bottom;
  svg << "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n"
      << "<path d=\"M" << fmt3(left) << ',' << fmt3(top) << " L" << fmt3(left) << ',' << fmt3(bottom) << " L"
      << fmt3(right) << ',' << fmt3(bottom) << "\"/>\n";
  for (double t : nice_ticks(frame.x_range()[0], frame.x_range()[1])) {
    const double x = frame.px(t);
    svg << "<path d=\"M" << fmt3(x) << ',' << fmt3(bottom) << " L" << fmt3(x) << ',' << fmt3(bottom + 5) << "\"/>\n";
    svg << "<text x=\"" << fmt3(x) << "\" y=\"" << fmt3(bottom + 18)
        << "\" stroke=\"none\" fill=\"#000000\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(frame.y_range()[0], frame.y_range()[1])) {
    const double y = frame.py(t);
    svg << "<path d=\"M" << fmt3(left - 5) << ',' << fmt3(y) << " L" << fmt3(left) << ',' << fmt3(y) << "\"/>\n";
    svg << "<text x=\"" << fmt3(left - 8) << "\" y=\"" << fmt3(y + 4)
        << "\" stroke=\"none\" fill=\"#000000\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }
  svg << "<text x=\"" << fmt3(0.5 * (left + right)) << "\" y=\"" << fmt3(spec.height - 10.0)
      << "\" stroke=\"none\" fill=\"#000000\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape_xml(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fmt3(0.5 * (top + bottom)) << "\" transform=\"rotate(-90 16 "
      << fmt3(0.5 * (top + bottom))
      << ")\" stroke=\"none\" fill=\"#000000\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape_xml(y_label) << "</text>\n";
  svg << "</g>\n";
}

struct LegendEntry {
  std::string label;
  std::string color;
  enum class Kind { Fill, Line, Dashed } kind = Kind::Fill;
};

void draw_legend(std::ostringstream& svg, const PlotSpec& spec, const std::vector<LegendEntry>& entries) {
  const double x = spec.width - spec.margin_right + 12.0;
  double y = spec.margin_top + 4.0;
  svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& e : entries) {
    switch (e.kind) {
      case LegendEntry::Kind::Fill:
        svg << "<rect x=\"" << fmt3(x) << "\" y=\"" << fmt3(y) << "\" width=\"14\" height=\"10\" fill=\"" << e.color
            << "\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
        break;
      case LegendEntry::Kind::Line:
      case LegendEntry::Kind::Dashed:
        svg << "<path d=\"M" << fmt3(x) << ',' << fmt3(y + 5) << " L" << fmt3(x + 14) << ',' << fmt3(y + 5)
            << "\" stroke=\"" << e.color << "\" stroke-width=\"2\" fill=\"none\""
            << (e.kind == LegendEntry::Kind::Dashed ? " stroke-dasharray=\"4,3\"" : "") << "/>\n";
        break;
    }
    svg << "<text class=\"legend-entry\" x=\"" << fmt3(x + 20) << "\" y=\"" << fmt3(y + 9) << "\">"
        << escape_xml(e.label) << "</text>\n";
    y += 16.0;
  }
  svg << "</g>\n";
}

std::string polyline_points(const Frame& frame, std::span<const double> xs, std::span<const double> ys) {
  std::string out;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (t) out += ' ';
    out += frame.xy(xs[t], ys[t]);
  }
  return out;
}

std::string band_path(const Frame& frame, std::span<const double> xs, const Envelope& env) {
  std::string d = "M";
  for (std::size_t t = 0; t < xs.size(); ++t) d += (t ? " L" : "") + frame.xy(xs[t], env.upper[t]);
  for (std::size_t t = xs.size(); t-- > 0;) d += " L" + frame.xy(xs[t], env.lower[t]);
  return d + " Z";
}

}  // namespace

std::array<double, 2> padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    const double half = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
    return {lo - half, hi + half};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

CloudPlot hdr_cloud_plot(const PointCloud2D& cloud, const Bandwidth& h, const HdrResult& hdr, const Palette& palette) {
  CloudPlot plot;
  plot.classes = hdr.classes;
  plot.marker = hdr.mode;
  plot.marker_label = "mode";
  if (cloud.size() == 0) return plot;

  Bounds b;
  for (const auto& p : cloud.points) b.add(p.x(), p.y());
  const double pad = 3.0 * std::sqrt(h.max_eigenvalue());
  constexpr int cells = 64;
  const double x0 = b.x_lo - pad;
  const double y0 = b.y_lo - pad;
  const double dx = (b.x_hi - b.x_lo + 2 * pad) / cells;
  const double dy = (b.y_hi - b.y_lo + 2 * pad) / cells;
  std::vector<Point2> centers;
  centers.reserve(cells * cells);
  for (int iy = 0; iy < cells; ++iy)
    for (int ix = 0; ix < cells; ++ix) centers.emplace_back(x0 + (ix + 0.5) * dx, y0 + (iy + 0.5) * dy);
  const std::vector<double> f = kde_eval(cloud, h, centers);

  auto raster = [&](double level, const std::string& name, const std::string& fill) {
    CloudLayer layer{name, fill, {}};
    for (int iy = 0; iy < cells; ++iy) {
      int ix = 0;
      while (ix < cells) {
        if (f[static_cast<std::size_t>(iy * cells + ix)] < level) {
          ++ix;
          continue;
        }
        const int start = ix;
        while (ix < cells && f[static_cast<std::size_t>(iy * cells + ix)] >= level) ++ix;
        const double xa = x0 + start * dx;
        const double xb = x0 + ix * dx;
        const double ya = y0 + iy * dy;
        const double yb = ya + dy;
        layer.polygons.push_back({{xa, ya}, {xb, ya}, {xb, yb}, {xa, yb}});
      }
    }
    plot.layers.push_back(std::move(layer));
  };
  // Lowest coverage level painted last so the 50% region sits on top.
  for (auto it = hdr.thresholds.rbegin(); it != hdr.thresholds.rend(); ++it) {
    char name[32];
    std::snprintf(name, sizeof name, "%g%% region", 100.0 * it->first);
    raster(it->second, name, it->first <= 0.5 ? palette.central : palette.outer);
  }
  return plot;
}

CloudPlot bagplot_cloud_plot(const PointCloud2D& cloud, const Bagplot& bagplot, const Palette& palette) {
  CloudPlot plot;
  plot.classes.assign(cloud.size(), CurveClass::Outer);
  for (std::size_t i : bagplot.bag_indices) plot.classes[i] = CurveClass::Central;
  for (std::size_t i : bagplot.outlier_indices) plot.classes[i] = CurveClass::Outlier;
  plot.marker = bagplot.median;
  plot.marker_label = "Tukey median";

  std::vector<Point2> kept;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (plot.classes[i] != CurveClass::Outlier) kept.push_back(cloud.points[i]);
  plot.layers.push_back({"loop", palette.outer, {convex_hull(kept).vertices}});
  plot.layers.push_back({"bag", palette.central, {bagplot.bag.vertices}});
  return plot;
}

std::string render_cloud(const PointCloud2D& cloud, const CloudPlot& plot, const PlotSpec& spec) {
  if (cloud.size() == 0) throw Error(Errc::EmptyPlot, "no points to draw");
  if (plot.classes.size() != cloud.size())
    throw Error(Errc::DimensionMismatch, "classes are not index-aligned with the cloud");

  Bounds b;
  for (const auto& p : cloud.points) b.add(p.x(), p.y());
  for (const auto& layer : plot.layers)
    for (const auto& poly : layer.polygons)
      for (const auto& v : poly) b.add(v.x(), v.y());
  if (plot.marker) b.add(plot.marker->x(), plot.marker->y());
  const Frame frame(spec, b);

  std::ostringstream svg;
  open_document(svg, spec);
  draw_axes(svg, spec, frame, "component 1", "component 2");

  svg << "<g id=\"regions\" stroke=\"none\">\n";
  for (const auto& layer : plot.layers) {
    for (const auto& poly : layer.polygons) {
      if (poly.empty()) continue;
      if (poly.size() <= 2) {
        // Degenerate regions (segments, points) drawn as a thick stroke.
        svg << "<path class=\"region\" data-layer=\"" << escape_xml(layer.name) << "\" d=\"M"
            << frame.xy(poly.front().x(), poly.front().y()) << " L" << frame.xy(poly.back().x(), poly.back().y())
            << "\" stroke=\"" << layer.fill << "\" stroke-width=\"4\" stroke-linecap=\"round\" fill=\"none\"/>\n";
        continue;
      }
      std::string d = "M";
      for (std::size_t k = 0; k < poly.size(); ++k) d += (k ? " L" : "") + frame.xy(poly[k].x(), poly[k].y());
      svg << "<path class=\"region\" data-layer=\"" << escape_xml(layer.name) << "\" d=\"" << d << " Z\" fill=\""
          << layer.fill << "\"/>\n";
    }
  }
  svg << "</g>\n";

  svg << "<g id=\"points\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
  std::size_t outlier_rank = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto c = plot.classes[i];
    const std::string& fill = c == CurveClass::Central ? spec.palette.central
                              : c == CurveClass::Outer ? spec.palette.outer
                                                       : spec.palette.outlier(outlier_rank++);
    svg << "<circle class=\"" << to_string(c) << "\" cx=\"" << fmt3(frame.px(cloud.points[i].x())) << "\" cy=\""
        << fmt3(frame.py(cloud.points[i].y())) << "\" r=\"" << (c == CurveClass::Outlier ? "4" : "3") << "\" fill=\""
        << fill << "\"/>\n";
  }
  svg << "</g>\n";

  if (plot.marker) {
    const double x = frame.px(plot.marker->x());
    const double y = frame.py(plot.marker->y());
    svg << "<path id=\"marker\" d=\"M" << fmt3(x - 6) << ',' << fmt3(y) << " L" << fmt3(x + 6) << ',' << fmt3(y)
        << " M" << fmt3(x) << ',' << fmt3(y - 6) << " L" << fmt3(x) << ',' << fmt3(y + 6) << "\" stroke=\""
        << spec.palette.median << "\" stroke-width=\"2.5\"/>\n";
  }

  std::vector<LegendEntry> legend;
  for (const auto& layer : plot.layers) legend.push_back({layer.name, layer.fill, LegendEntry::Kind::Fill});
  if (plot.marker) legend.push_back({plot.marker_label, spec.palette.median, LegendEntry::Kind::Line});
  draw_legend(svg, spec, legend);
  svg << "</svg>\n";
  return svg.str();
}

std::string render_functional(const EnsembleSummary& summary, const FunctionalSample& sample, const PlotSpec& spec) {
  if (sample.size() == 0 || summary.center_curve.empty()) throw Error(Errc::EmptyPlot, "nothing to draw");
  const std::size_t m = sample.points();
  if (summary.center_curve.size() != m || summary.classes.size() != sample.size())
    throw Error(Errc::DimensionMismatch, "summary does not match the sample");
  const auto grid = sample.grid();
  const std::vector<std::size_t> outliers = summary.indices_of(CurveClass::Outlier);

  Bounds b;
  auto add_curve = [&](std::span<const double> ys) {
    for (std::size_t t = 0; t < m; ++t) b.add(grid[t], ys[t]);
  };
  add_curve(summary.center_curve);
  if (!summary.nonoutlier_envelope.lower.empty()) {
    add_curve(summary.nonoutlier_envelope.lower);
    add_curve(summary.nonoutlier_envelope.upper);
  }
  if (!summary.central_envelope.lower.empty()) {
    add_curve(summary.central_envelope.lower);
    add_curve(summary.central_envelope.upper);
  }
  if (summary.ci_band) {
    add_curve(summary.ci_band->lower);
    add_curve(summary.ci_band->upper);
  }
  for (std::size_t i : outliers) add_curve(sample.curve(i));
  const Frame frame(spec, b);

  std::ostringstream svg;
  open_document(svg, spec);
  draw_axes(svg, spec, frame, spec.x_label, spec.y_label);

  svg << "<g id=\"bands\" stroke=\"none\">\n";
  if (!summary.nonoutlier_envelope.lower.empty())
    svg << "<path class=\"nonoutlier-band\" d=\"" << band_path(frame, grid, summary.nonoutlier_envelope)
        << "\" fill=\"" << spec.palette.outer << "\"/>\n";
  if (!summary.central_envelope.lower.empty())
    svg << "<path class=\"central-band\" d=\"" << band_path(frame, grid, summary.central_envelope) << "\" fill=\""
        << spec.palette.central << "\"/>\n";
  svg << "</g>\n";

  svg << "<g id=\"curves\" fill=\"none\">\n";
  for (std::size_t k = 0; k < outliers.size(); ++k)
    svg << "<polyline class=\"outlier\" data-label=\"" << escape_xml(sample.labels()[outliers[k]]) << "\" points=\""
        << polyline_points(frame, grid, sample.curve(outliers[k])) << "\" stroke=\"" << spec.palette.outlier(k)
        << "\" stroke-width=\"1.5\"/>\n";
  if (summary.ci_band) {
    for (const auto* side : {&summary.ci_band->lower, &summary.ci_band->upper})
      svg << "<polyline class=\"ci\" points=\"" << polyline_points(frame, grid, *side) << "\" stroke=\""
          << spec.palette.ci << "\" stroke-width=\"1.2\" stroke-dasharray=\"4,3\"/>\n";
  }
  svg << "<polyline class=\"median\" points=\"" << polyline_points(frame, grid, summary.center_curve)
      << "\" stroke=\"" << spec.palette.median << "\" stroke-width=\"2\"/>\n";
  svg << "</g>\n";

  std::vector<LegendEntry> legend;
  legend.push_back({summary.method == Method::HDR ? "mode curve" : "median curve", spec.palette.median,
                    LegendEntry::Kind::Line});
  legend.push_back({"central region", spec.palette.central, LegendEntry::Kind::Fill});
  legend.push_back({"non-outlier envelope", spec.palette.outer, LegendEntry::Kind::Fill});
  if (summary.ci_band) legend.push_back({"median 95% CI", spec.palette.ci, LegendEntry::Kind::Dashed});
  for (std::size_t k = 0; k < outliers.size(); ++k)
    legend.push_back({sample.labels()[outliers[k]], spec.palette.outlier(k), LegendEntry::Kind::Line});
  draw_legend(svg, spec, legend);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fundepth
