#include "fundepth/banddepth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fundepth/error.hpp"
#include "fundepth/parallel.hpp"
#include "fundepth/rng.hpp"
#include "fundepth/stats.hpp"

namespace fundepth {

bool band_contains(std::span<const double> y, std::span<const double> yi, std::span<const double> yj) {
  if (y.size() != yi.size() || y.size() != yj.size())
    throw Error(Errc::LengthMismatch, "curves of different lengths");
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double lo = std::min(yi[t], yj[t]);
    const double hi = std::max(yi[t], yj[t]);
    if (y[t] < lo || y[t] > hi) return false;
  }
  return true;
}

BandDepthResult bd2_all(const RowMatrix& curves) {
  const auto n = static_cast<std::size_t>(curves.rows());
  const auto m = static_cast<std::size_t>(curves.cols());
  if (n < 2) throw Error(Errc::TooFewPoints, "band depth needs at least 2 curves");

  // One count vector per first pair index keeps the parallel loop free of
  // shared writes; integer sums make the result order-independent.
  std::vector<std::vector<std::uint64_t>> partial(n);
  parallel_for(n - 1, [&](std::size_t i) {
    auto& counts = partial[i];
    counts.assign(n, 0);
    std::vector<double> lo(m);
    std::vector<double> hi(m);
    const double* yi = curves.data() + i * m;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* yj = curves.data() + j * m;
      for (std::size_t t = 0; t < m; ++t) {
        lo[t] = std::min(yi[t], yj[t]);
        hi[t] = std::max(yi[t], yj[t]);
      }
      counts[i] += 1;
      counts[j] += 1;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double* yk = curves.data() + k * m;
        std::size_t t = 0;
        while (t < m && yk[t] >= lo[t] && yk[t] <= hi[t]) ++t;
        if (t == m) counts[k] += 1;
      }
    }
  });

  BandDepthResult out;
  out.pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  out.counts.assign(n, 0);
  for (const auto& counts : partial)
    for (std::size_t k = 0; k < counts.size(); ++k) out.counts[k] += counts[k];
  out.depths.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    out.depths[k] = static_cast<double>(out.counts[k]) / static_cast<double>(out.pairs);
  out.ranking.resize(n);
  std::iota(out.ranking.begin(), out.ranking.end(), 0);
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return out.counts[a] > out.counts[b]; });
  return out;
}

BandDepthResult bd2_all(const FunctionalSample& sample) { return bd2_all(sample.values()); }

Curve median_curve(const RowMatrix& curves, const BandDepthResult& depths) {
  const auto n = static_cast<std::size_t>(curves.rows());
  const auto m = static_cast<std::size_t>(curves.cols());
  if (depths.counts.size() != n) throw Error(Errc::DimensionMismatch, "depths do not match the sample");
  const std::uint64_t top = depths.counts[depths.ranking.front()];
  Curve out(m, 0.0);
  std::size_t tied = 0;
  for (std::size_t r : depths.ranking) {
    if (depths.counts[r] != top) break;
    for (std::size_t t = 0; t < m; ++t) out[t] += curves(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t));
    ++tied;
  }
  if (tied == 1) return out;
  for (double& v : out) v /= static_cast<double>(tied);
  return out;
}

Curve median_curve(const FunctionalSample& sample, const BandDepthResult& depths) {
  return median_curve(sample.values(), depths);
}

Envelope envelope_of(const RowMatrix& curves, std::span<const std::size_t> rows) {
  const auto m = static_cast<std::size_t>(curves.cols());
  Envelope env;
  if (rows.empty()) return env;
  env.lower.assign(m, 0.0);
  env.upper.assign(m, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    double lo = curves(static_cast<Eigen::Index>(rows.front()), static_cast<Eigen::Index>(t));
    double hi = lo;
    for (std::size_t r : rows) {
      const double v = curves(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    env.lower[t] = lo;
    env.upper[t] = hi;
  }
  return env;
}

Envelope central_region(const FunctionalSample& sample, const BandDepthResult& depths, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidArgument, "alpha must be in (0,1]");
  if (depths.ranking.size() != sample.size()) throw Error(Errc::DimensionMismatch, "depths do not match the sample");
  const std::size_t k = coverage_count(alpha, sample.size());
  return envelope_of(sample.values(), std::span(depths.ranking).first(k));
}

FunctionalBoxplot functional_boxplot(const FunctionalSample& sample, double alpha, double factor) {
  if (sample.size() < 2) throw Error(Errc::TooFewPoints, "a functional boxplot needs at least 2 curves");
  if (!(factor >= 0.0) || !std::isfinite(factor)) throw Error(Errc::InvalidArgument, "factor must be nonnegative");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidArgument, "alpha must be in (0,1]");

  FunctionalBoxplot box;
  box.alpha = alpha;
  box.factor = factor;
  box.depths = bd2_all(sample);
  box.median_curve = median_curve(sample, box.depths);
  // A band needs two generators; a one-curve central region has zero height
  // and would flag every other curve.
  const std::size_t k = std::min(sample.size(), std::max<std::size_t>(2, coverage_count(alpha, sample.size())));
  box.central_indices.assign(box.depths.ranking.begin(), box.depths.ranking.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(box.central_indices.begin(), box.central_indices.end());
  box.central = envelope_of(sample.values(), box.central_indices);

  const std::size_t m = sample.points();
  box.fence.lower.resize(m);
  box.fence.upper.resize(m);
  for (std::size_t t = 0; t < m; ++t) {
    const double height = box.central.upper[t] - box.central.lower[t];
    box.fence.lower[t] = box.central.lower[t] - factor * height;
    box.fence.upper[t] = box.central.upper[t] + factor * height;
  }

  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto y = sample.curve(i);
    bool ok = true;
    for (std::size_t t = 0; t < m && ok; ++t) ok = y[t] >= box.fence.lower[t] && y[t] <= box.fence.upper[t];
    (ok ? inside : box.outlier_indices).push_back(i);
  }
  box.nonoutlier = envelope_of(sample.values(), inside);
  return box;
}

Envelope bootstrap_median_ci(const FunctionalSample& sample, std::size_t resamples, double gamma, std::uint64_t seed,
                             double level) {
  if (resamples < 100) throw Error(Errc::TooFewResamples, "bootstrap needs at least 100 resamples");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error(Errc::InvalidArgument, "smoothing fraction must be nonnegative");
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::InvalidArgument, "confidence level must be in (0,1)");
  const std::size_t n = sample.size();
  const std::size_t m = sample.points();
  if (n < 2) throw Error(Errc::TooFewPoints, "bootstrap needs at least 2 curves");

  std::vector<double> noise_sd(m);
  {
    std::vector<double> column(n);
    for (std::size_t t = 0; t < m; ++t) {
      for (std::size_t i = 0; i < n; ++i) column[i] = sample.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
      noise_sd[t] = gamma * sample_stddev(column);
    }
  }

  RowMatrix medians(static_cast<Eigen::Index>(resamples), static_cast<Eigen::Index>(m));
  parallel_for(resamples, [&](std::size_t b) {
    auto engine = stream_engine(seed, b);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RowMatrix resample(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
      resample.row(static_cast<Eigen::Index>(i)) = sample.values().row(static_cast<Eigen::Index>(pick(engine)));
      if (gamma > 0.0)
        for (std::size_t t = 0; t < m; ++t)
          resample(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) += noise_sd[t] * gauss(engine);
    }
    const Curve med = median_curve(resample, bd2_all(resample));
    for (std::size_t t = 0; t < m; ++t) medians(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t)) = med[t];
  });

  const double lo_q = 0.5 * (1.0 - level);
  Envelope ci;
  ci.lower.resize(m);
  ci.upper.resize(m);
  std::vector<double> column(resamples);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t b = 0; b < resamples; ++b) column[b] = medians(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t));
    ci.lower[t] = quantile_inplace(column, lo_q);
    ci.upper[t] = quantile_inplace(column, 1.0 - lo_q);
  }
  return ci;
}

void to_json(nlohmann::json& j, const BandDepthResult& result) {
  j = nlohmann::json::object();
  j["pairs"] = result.pairs;
  j["counts"] = result.counts;
  j["depths"] = result.depths;
  j["ranking"] = result.ranking;
}

void to_json(nlohmann::json& j, const Envelope& envelope) {
  j = {{"lower", envelope.lower}, {"upper", envelope.upper}};
}

void to_json(nlohmann::json& j, const FunctionalBoxplot& boxplot) {
  j = nlohmann::json::object();
  j["alpha"] = boxplot.alpha;
  j["factor"] = boxplot.factor;
  j["median_curve"] = boxplot.median_curve;
  j["central"] = boxplot.central;
  j["fence"] = boxplot.fence;
  j["nonoutlier"] = boxplot.nonoutlier;
  j["central_indices"] = boxplot.central_indices;
  j["outlier_indices"] = boxplot.outlier_indices;
  j["depths"] = boxplot.depths;
}

}  // namespace fundepth
