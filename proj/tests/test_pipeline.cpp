#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fundepth/error.hpp"
#include "fundepth/pipeline.hpp"
#include "support.hpp"

using namespace fundepth;

namespace {

PipelineConfig quick() {
  PipelineConfig c;
  c.bootstrap = 0;
  return c;
}

bool contains_all(const std::vector<std::size_t>& set, std::initializer_list<std::size_t> wanted) {
  return std::all_of(wanted.begin(), wanted.end(),
                     [&](std::size_t i) { return std::find(set.begin(), set.end(), i) != set.end(); });
}

void check_envelopes(const EnsembleSummary& s, const FunctionalSample& sample) {
  REQUIRE(s.classes.size() == sample.size());
  const auto outliers = s.indices_of(CurveClass::Outlier);
  for (std::size_t t = 0; t < sample.points(); ++t) {
    CHECK(s.nonoutlier_envelope.lower[t] <= s.central_envelope.lower[t]);
    CHECK(s.central_envelope.upper[t] <= s.nonoutlier_envelope.upper[t]);
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (s.classes[i] == CurveClass::Outlier) continue;
      CHECK(s.nonoutlier_envelope.lower[t] <= sample.values()(i, t));
      CHECK(sample.values()(i, t) <= s.nonoutlier_envelope.upper[t]);
    }
  }
  CHECK(s.indices_of(CurveClass::Central).size() + s.indices_of(CurveClass::Outer).size() + outliers.size() ==
        sample.size());
}

}  // namespace

TEST_CASE("all methods on a transient ensemble with planted outliers") {
  const auto sample = testing::transient_ensemble(3, 100, 150, 3);
  auto cfg = quick();
  cfg.fence = FenceKind::Geometric;
  for (auto run : {run_hdr, run_bagplot, run_band_depth}) {
    const auto s = run(sample, cfg);
    check_envelopes(s, sample);
    CHECK_FALSE(s.indices_of(CurveClass::Central).empty());
    CHECK(contains_all(s.indices_of(CurveClass::Outlier), {97, 98, 99}));
    CHECK(s.center_curve.size() == 150);
  }
}

TEST_CASE("identical curves are rejected by the 2D methods") {
  RowMatrix v(5, 4);
  v.setConstant(1.0);
  const FunctionalSample flat(testing::uniform_grid(4), v);
  for (auto run : {run_hdr, run_bagplot}) {
    try {
      run(flat, quick());
      FAIL("expected DegenerateSample");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DegenerateSample);
    }
  }
}

TEST_CASE("bagplot center of a symmetric cloud") {
  // Scores (+-a, 0) and (0, +-b) mirrored: the Tukey median is the centroid.
  const std::size_t m = 6;
  RowMatrix v(8, m);
  for (std::size_t t = 0; t < m; ++t) {
    const double u = std::sin(0.5 * t), w = std::cos(0.7 * t);
    const double pts[8][2] = {{3, 0}, {-3, 0}, {0, 1}, {0, -1}, {2, 0.5}, {-2, -0.5}, {-2, 0.5}, {2, -0.5}};
    for (int i = 0; i < 8; ++i) v(i, t) = 10.0 + pts[i][0] * u + pts[i][1] * w;
  }
  const FunctionalSample s(testing::uniform_grid(m), v);
  const auto res = run_bagplot(s, quick());
  const Eigen::VectorXd mean = s.values().colwise().mean().transpose();
  for (std::size_t t = 0; t < m; ++t) CHECK(std::abs(res.center_curve[t] - mean[t]) < 1e-6);
}

TEST_CASE("tight Gaussian bagplot has no depth-fence outliers") {
  std::mt19937_64 rng(4);
  const auto s = testing::random_sample(rng, 200, 8);
  const auto res = run_bagplot(s, quick());
  CHECK(res.indices_of(CurveClass::Outlier).empty());
}

TEST_CASE("band depth pipeline") {
  RowMatrix v(4, 2);
  v << 0, 0, 1, 0.25, 2, 2, 3, 0.5;
  const FunctionalSample four({0, 1}, v);
  CHECK(run_band_depth(four, quick()).center_curve == Curve{1, 0.25});

  RowMatrix two(2, 3);
  two << 0, 1, 2, 2, 1, 0;
  const auto s2 = run_band_depth(FunctionalSample({0, 1, 2}, two), quick());
  CHECK(s2.indices_of(CurveClass::Central).size() == 2);
  CHECK(s2.indices_of(CurveClass::Outlier).empty());

  const auto sample = testing::transient_ensemble(5, 60, 40, 2);
  const auto res = run_band_depth(sample, quick());
  REQUIRE(res.boxplot);
  std::vector<double> d = res.boxplot->depths.depths;
  std::vector<double> sorted = d;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted[sorted.size() / 2];
  for (auto i : res.indices_of(CurveClass::Outlier)) CHECK(d[i] < med);
}

TEST_CASE("random inputs: classes partition and envelopes nest") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sample = testing::random_sample(rng, 30, 7);
    for (auto run : {run_hdr, run_bagplot, run_band_depth}) check_envelopes(run(sample, quick()), sample);
  }
}

TEST_CASE("bootstrap intervals and determinism") {
  const auto sample = testing::transient_ensemble(8, 40, 30, 1);
  PipelineConfig cfg;
  cfg.bootstrap = 100;
  cfg.seed = 12;
  for (auto run : {run_bagplot, run_band_depth}) {
    const auto a = run(sample, cfg);
    const auto b = run(sample, cfg);
    REQUIRE(a.ci_band);
    CHECK(summary_json(a, sample).dump() == summary_json(b, sample).dump());
    for (std::size_t t = 0; t < sample.points(); ++t) CHECK(a.ci_band->lower[t] <= a.ci_band->upper[t]);
    CHECK(a.metadata.at("seed") == 12);
  }
}

TEST_CASE("HDR options") {
  const auto sample = testing::transient_ensemble(9, 50, 30, 2);
  auto cfg = quick();
  cfg.n_outliers = 2;
  const auto s = run_hdr(sample, cfg);
  CHECK(s.indices_of(CurveClass::Outlier) == std::vector<std::size_t>{48, 49});

  cfg.snap_to_sample = true;
  const auto snapped = run_hdr(sample, cfg);
  bool is_sample = false;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto c = sample.curve(i);
    is_sample |= std::equal(c.begin(), c.end(), snapped.center_curve.begin());
  }
  CHECK(is_sample);

  Eigen::Matrix2d bad;
  bad << 1, 0, 0, 0;
  cfg.bandwidth = bad;
  CHECK_THROWS_AS(run_hdr(sample, cfg), Error);
}

TEST_CASE("multimodal warning") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> z(0.0, 0.05);
  RowMatrix v(60, 5);
  for (Eigen::Index i = 0; i < 60; ++i)
    for (Eigen::Index t = 0; t < 5; ++t) v(i, t) = (i < 30 ? -1.0 : 1.0) * (t + 1) + z(rng);
  const auto s = run_hdr(FunctionalSample(testing::uniform_grid(5), v), quick());
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("summary JSON and CSV exports") {
  const auto sample = testing::transient_ensemble(11, 20, 10, 0);
  const auto s = run_band_depth(sample, quick());
  const auto j = summary_json(s, sample);
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("method") == "banddepth");
  CHECK(j.at("n") == 20);
  CHECK(j.at("classes").size() == 20);
  CHECK(j.at("ci_band").is_null());

  std::ostringstream env;
  write_envelope_csv(env, s, sample);
  const std::string text = env.str();
  CHECK(text.rfind("t,center,central_lower,central_upper,nonoutlier_lower,nonoutlier_upper\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);

  std::ostringstream dep;
  write_depth_csv(dep, s.boxplot->depths, sample);
  CHECK(dep.str().rfind("label,depth,rank\nc0001,", 0) == 0);
}
