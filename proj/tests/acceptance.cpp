// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fundepth/banddepth.hpp"
#include "fundepth/density.hpp"
#include "fundepth/halfspace.hpp"
#include "fundepth/reduction.hpp"
#include "support.hpp"

using namespace fundepth;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------- 1
Outcome worked_example() {
  Outcome o;
  RowMatrix v(4, 2);
  v << 0, 0, 1, 0.25, 2, 2, 3, 0.5;
  const FunctionalSample s({0.0, 1.0}, v);
  const auto r = bd2_all(s);
  o.require(r.counts == std::vector<std::uint64_t>{3, 5, 3, 3} && r.pairs == 6, "counts differ from 3,5,3,3 of 6");
  o.require(r.depths == std::vector<double>{3.0 / 6, 5.0 / 6, 3.0 / 6, 3.0 / 6}, "depths differ");
  o.require(median_curve(s, r) == Curve{1, 0.25}, "median is not y2");
  o.detail = o.pass ? "BD2 = (3/6, 5/6, 3/6, 3/6), median y2" : o.detail;
  return o;
}

// ---------------------------------------------------------------- 2
Outcome depth_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  std::size_t points = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(rng);
    const auto cloud = trial % 2 ? testing::integer_cloud(rng, n, 4) : testing::gaussian_cloud(rng, n);
    const auto depths = sample_depths(cloud);
    for (std::size_t i = 0; i < n; ++i) {
      o.require(depths[i] == testing::brute_tukey_depth(cloud.points[i], cloud),
                "trial " + std::to_string(trial) + " point " + std::to_string(i));
      ++points;
    }
  }
  if (o.pass) o.detail = std::to_string(points) + " sample points, exact integer agreement";
  return o;
}

// ---------------------------------------------------------------- 3
Outcome bd2_oracle() {
  Outcome o;
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<std::size_t> nn(2, 15), mm(2, 10);
  std::uniform_int_distribution<int> small(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = nn(rng), m = mm(rng);
    RowMatrix v = testing::random_sample(rng, n, m).values();
    if (trial % 2)
      for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = small(rng);
    const auto r = bd2_all(v);
    // equal integer numerators over the same C(n,2) is exact rational equality
    o.require(r.counts == testing::brute_bd2_counts(v) && r.pairs == n * (n - 1) / 2,
              "trial " + std::to_string(trial));
  }
  if (o.pass) o.detail = "200 samples, identical pair counts";
  return o;
}

// ---------------------------------------------------------------- 4
Outcome gaussian_retention() {
  Outcome o;
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto cloud = testing::gaussian_cloud(rng, 1000);
    const auto bp = build_bagplot(cloud, 2.57);
    total += 1.0 - static_cast<double>(bp.outlier_indices.size()) / 1000.0;
  }
  const double mean = total / 20.0;
  o.require(mean >= 0.975 && mean <= 1.0, "mean retention " + std::to_string(mean));
  char buf[96];
  std::snprintf(buf, sizeof buf, "mean non-outlier fraction %.4f", mean);
  if (o.pass) o.detail = buf;
  return o;
}

// ---------------------------------------------------------------- 5
Outcome kde_correctness() {
  Outcome o;
  const PointCloud2D one{{{0, 0}}};
  const double center = kde_eval(one, Bandwidth::diagonal(1, 1), Point2(0, 0));
  o.require(std::abs(center - 1.0 / (2.0 * M_PI)) < 1e-12, "kernel center value");

  std::mt19937_64 rng(5);
  const auto cloud = testing::gaussian_cloud(rng, 100);
  const auto h = scott_bandwidth(cloud);
  const int g = 400;
  const double step = 20.0 / g;
  std::vector<Point2> q;
  q.reserve(g * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) q.emplace_back(-10.0 + (i + 0.5) * step, -10.0 + (j + 0.5) * step);
  const auto f = kde_eval(cloud, h, q);
  const double integral = std::accumulate(f.begin(), f.end(), 0.0) * step * step;
  o.require(std::abs(integral - 1.0) <= 1e-3, "integral " + std::to_string(integral));
  char buf[96];
  std::snprintf(buf, sizeof buf, "center error %.1e, integral %.6f", std::abs(center - 1.0 / (2.0 * M_PI)), integral);
  if (o.pass) o.detail = buf;
  return o;
}

// ---------------------------------------------------------------- 6
Outcome hdr_coverage() {
  Outcome o;
  std::mt19937_64 rng(66);
  std::uniform_int_distribution<std::size_t> size(2, 200);
  const std::vector<double> alphas = {0.5, 0.95};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(rng);
    const auto cloud = trial % 4 == 0 ? testing::integer_cloud(rng, n, 2) : testing::gaussian_cloud(rng, n);
    const auto h = trial % 4 == 0 ? Bandwidth::diagonal(0.5, 0.5) : scott_bandwidth(cloud);
    const auto th = hdr_thresholds(cloud, h, alphas);
    const auto f = kde_eval(cloud, h, cloud.points);
    const double f50 = th.at(0.5);
    const auto inside = static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [&](double v) { return v >= f50; }));
    const auto ties = static_cast<std::size_t>(std::count(f.begin(), f.end(), f50));
    o.require(inside >= n / 2 && inside <= (n + 1) / 2 + ties, "coverage, trial " + std::to_string(trial));
    o.require(f50 >= th.at(0.95), "threshold order, trial " + std::to_string(trial));
  }
  if (o.pass) o.detail = "100 clouds within [floor(n/2), ceil(n/2)+ties], f_0.5 >= f_0.95";
  return o;
}

// ---------------------------------------------------------------- 7
Outcome pca_checks() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst_ratio = 0.0, worst_rms = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + 5 * trial, m = 3 + trial % 12;
    const auto s = testing::random_sample(rng, n, m);
    const auto ev = testing::jacobi_eigenvalues(testing::covariance(s.values()));
    const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
    const std::size_t rank = std::min(n - 1, m);
    double previous = 0.0;
    for (std::size_t p = 1; p <= rank; ++p) {
      const auto model = fit_pca(s, p);
      double cum = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        worst_ratio = std::max(worst_ratio, std::abs(model.var_ratios[k] - ev[k] / total));
        cum += model.var_ratios[k];
      }
      o.require(cum >= previous, "cumulative variance decreased");
      previous = cum;
    }
    const auto full = fit_pca(s, m);
    const RowMatrix sc = scores(full, s);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::VectorXd back = reconstruct(full, sc.row(static_cast<Eigen::Index>(i)).transpose());
      sq += (back - s.values().row(static_cast<Eigen::Index>(i)).transpose()).squaredNorm();
    }
    worst_rms = std::max(worst_rms, std::sqrt(sq / static_cast<double>(n * m)));
  }
  o.require(worst_ratio <= 1e-8, "var_ratio error " + std::to_string(worst_ratio));
  o.require(worst_rms < 1e-8, "round-trip rms " + std::to_string(worst_rms));
  char buf[96];
  std::snprintf(buf, sizeof buf, "max var_ratio error %.1e, max round-trip rms %.1e", worst_ratio, worst_rms);
  if (o.pass) o.detail = buf;
  return o;
}

// ---------------------------------------------------------------- 8
Outcome robust_pca_contamination() {
  Outcome o;
  const std::size_t n = 100, m = 40;
  double worst = 0.0, total = 0.0, fooled = 180.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::VectorXd u(m), v(m);
    for (std::size_t t = 0; t < m; ++t) {
      u[static_cast<Eigen::Index>(t)] = std::sin(M_PI * (t + 0.5) / m);
      v[static_cast<Eigen::Index>(t)] = std::sin(2.0 * M_PI * (t + 0.5) / m);
    }
    u.normalize();
    v.normalize();
    RowMatrix x(n, m);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 5.0 * z(rng), b = z(rng);
      for (std::size_t t = 0; t < m; ++t)
        x(i, t) = a * u[static_cast<Eigen::Index>(t)] + b * v[static_cast<Eigen::Index>(t)] + 0.1 * z(rng);
    }
    const auto grid = testing::uniform_grid(m);
    const FunctionalSample clean(grid, x);
    const Eigen::VectorXd reference = fit_pca(clean, 1).loadings.row(0).transpose();

    // sigma: overall sd of the clean values
    const double mean = x.mean();
    const double sigma = std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
    x.row(0) += (100.0 * sigma * v).transpose();
    const FunctionalSample dirty(grid, x);
    auto angle_to_reference = [&](const PcaModel& model) {
      const Eigen::VectorXd dir = model.loadings.row(0).transpose();
      return std::acos(std::min(1.0, std::abs(dir.dot(reference)))) * 180.0 / M_PI;
    };
    const double angle = angle_to_reference(fit_robust_pca(dirty, 2, seed));
    worst = std::max(worst, angle);
    total += angle;
    fooled = std::min(fooled, angle_to_reference(fit_pca(dirty, 1)));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "robust angle worst %.3f deg, mean %.3f deg; classical at least %.1f deg",
                worst, total / 20.0, fooled);
  o.require(worst <= 5.0, buf);
  if (o.pass) o.detail = buf;
  return o;
}

// ---------------------------------------------------------------- 9
Outcome boxplot_invariants() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> nn(5, 40), mm(2, 30);
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-1e3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_sample(rng, nn(rng), mm(rng));
    const auto box = functional_boxplot(s, 0.5, 1.5);
    std::vector<bool> out(s.size(), false);
    for (auto i : box.outlier_indices) out[i] = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (out[i]) continue;
      for (std::size_t t = 0; t < s.points(); ++t)
        o.require(box.fence.lower[t] <= s.values()(i, t) && s.values()(i, t) <= box.fence.upper[t],
                  "non-outlier outside the fence, trial " + std::to_string(trial));
    }
    std::set<std::size_t> prev(box.outlier_indices.begin(), box.outlier_indices.end());
    for (double f : {2.0, 3.0, 4.5, 10.0}) {
      const auto b = functional_boxplot(s, 0.5, f);
      const std::set<std::size_t> cur(b.outlier_indices.begin(), b.outlier_indices.end());
      o.require(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()),
                "outlier set grew with factor, trial " + std::to_string(trial));
      prev = cur;
    }
    const double a = scale(rng), c = shift(rng);
    const RowMatrix mapped = (a * s.values()).array() + c;
    const auto r0 = bd2_all(s);
    const auto r1 = bd2_all(mapped);
    o.require(r0.depths == r1.depths && r0.ranking == r1.ranking, "affine map changed depths, trial " + std::to_string(trial));
  }
  if (o.pass) o.detail = "100 samples: fence containment, factor monotonicity, affine invariance";
  return o;
}

// ---------------------------------------------------------------- 10
struct CliRun {
  int code;
  std::string json;
  std::string svg;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

CliRun invoke(const std::vector<std::string>& args, const fs::path& dir) {
  std::vector<std::string> full = {"fundepth"};
  full.insert(full.end(), args.begin(), args.end());
  const auto json = (dir / "out.json").string();
  const auto svg = (dir / "out.svg").string();
  for (const auto& extra : {std::string("--json"), json, std::string("--svg"), svg}) full.push_back(extra);
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  CliRun r{code, slurp(json), slurp(svg)};
  fs::remove(json);
  fs::remove(svg);
  return r;
}

Outcome end_to_end() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "fundepth_acceptance";
  fs::create_directories(dir);
  const auto input = (dir / "ensemble.csv").string();
  const std::size_t n = 100, planted = 3;
  const auto sample = testing::transient_ensemble(2024, n, 150, planted);
  save_curves(input, sample);

  // The bagplot uses the geometric fence: for a unimodal cloud of this size
  // the depth-unit fence lies below zero and can flag nothing.
  const std::vector<std::vector<std::string>> runs = {
      {"hdr", "--input", input, "--seed", "7"},
      {"bagplot", "--input", input, "--seed", "7", "--fence", "geometric"},
      {"fbplot", "--input", input, "--seed", "7"},
  };
  std::string flagged;
  for (const auto& args : runs) {
    const auto a = invoke(args, dir);
    const auto b = invoke(args, dir);
    o.require(a.code == 0 && b.code == 0, args[0] + " failed");
    o.require(!a.json.empty() && !a.svg.empty(), args[0] + " wrote nothing");
    o.require(a.json == b.json && a.svg == b.svg, args[0] + " output not byte-identical");
    if (a.code != 0) continue;
    const auto j = nlohmann::json::parse(a.json);
    const auto labels = j.at("outliers").get<std::vector<std::string>>();
    for (std::size_t k = n - planted; k < n; ++k)
      o.require(std::find(labels.begin(), labels.end(), sample.labels()[k]) != labels.end(),
                args[0] + " missed planted " + sample.labels()[k]);
    flagged += " " + args[0] + "=" + std::to_string(labels.size());
  }
  fs::remove_all(dir);
  if (o.pass) o.detail = "byte-identical reruns, planted outliers flagged; outliers:" + flagged;
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "band-depth worked example", 0.001, worked_example},
      {2, "Tukey depth vs brute force", 10, depth_oracle},
      {3, "BD2 vs exhaustive enumeration", 5, bd2_oracle},
      {4, "Gaussian fence retention (coef 2.57)", 30, gaussian_retention},
      {5, "KDE center value and integral", 5, kde_correctness},
      {6, "HDR coverage and threshold order", 10, hdr_coverage},
      {7, "PCA ratios, monotonicity, round trip", 5, pca_checks},
      {8, "robust PCA under contamination", 20, robust_pca_contamination},
      {9, "functional boxplot invariants", 20, boxplot_invariants},
      {10, "CLI determinism and planted outliers", 60, end_to_end},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %2d %-40s %9.3f s (limit %g s)  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_s,
                o.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
