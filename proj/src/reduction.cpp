#include "fundepth/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "fundepth/error.hpp"
#include "fundepth/stats.hpp"

namespace fundepth {

namespace {

void check_components(const FunctionalSample& sample, std::size_t p) {
  const std::size_t n = sample.size();
  const std::size_t m = sample.points();
  if (n < 2) throw Error(Errc::TooFewPoints, "PCA needs at least 2 curves");
  const std::size_t limit = std::min(n - 1, m);
  if (p < 1 || p > limit)
    throw Error(Errc::KOutOfRange, "component count " + std::to_string(p) + " outside [1, " +
                                       std::to_string(limit) + "]");
}

bool all_curves_identical(const RowMatrix& x) {
  return (x.rowwise() - x.row(0)).cwiseAbs().maxCoeff() == 0.0;
}

// Largest-magnitude entry positive; the first index wins among equal magnitudes.
void canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  if (v[best] < 0.0) v = -v;
}

// Orthonormal vector in the complement of the given rows, built from the
// standard basis by Gram-Schmidt.
Eigen::VectorXd complement_vector(const RowMatrix& basis, Eigen::Index rows_used, Eigen::Index dim) {
  for (Eigen::Index c = 0; c < dim; ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, c);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index r = 0; r < rows_used; ++r) v -= basis.row(r).dot(v) * basis.row(r).transpose();
    const double norm = v.norm();
    if (norm > 1e-6) return v / norm;
  }
  return Eigen::VectorXd::Zero(dim);
}

struct Eigenpairs {
  Eigen::VectorXd values;  // descending
  RowMatrix vectors;       // one unit vector per row, over the m curve points
  double total = 0.0;      // sum of all eigenvalues (trace of the covariance)
};

// Top-p eigenpairs of the empirical covariance of the rows of `centered`,
// through the m x m covariance when m <= n and the n x n Gram matrix otherwise.
Eigenpairs covariance_eigenpairs(const RowMatrix& centered, std::size_t p) {
  const Eigen::Index n = centered.rows();
  const Eigen::Index m = centered.cols();
  const double denom = static_cast<double>(n - 1);
  Eigenpairs out;
  out.values.resize(static_cast<Eigen::Index>(p));
  out.vectors.resize(static_cast<Eigen::Index>(p), m);
  out.total = centered.squaredNorm() / denom;

  if (m <= n) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(p); ++k) {
      const Eigen::Index src = m - 1 - k;
      out.values[k] = std::max(0.0, solver.eigenvalues()[src]);
      out.vectors.row(k) = solver.eigenvectors().col(src).transpose();
    }
  } else {
    const Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(p); ++k) {
      const Eigen::Index src = n - 1 - k;
      const double lambda = std::max(0.0, solver.eigenvalues()[src]);
      out.values[k] = lambda;
      Eigen::VectorXd u = centered.transpose() * solver.eigenvectors().col(src);
      for (Eigen::Index r = 0; r < k; ++r) u -= out.vectors.row(r).dot(u) * out.vectors.row(r).transpose();
      const double norm = u.norm();
      if (norm > 1e-9 * std::sqrt(std::max(out.total, 1e-300)) && lambda > 0.0)
        out.vectors.row(k) = (u / norm).transpose();
      else
        out.vectors.row(k) = complement_vector(out.vectors, k, m).transpose();
    }
  }
  // Re-orthonormalize against accumulated rounding, then fix signs.
  for (Eigen::Index k = 0; k < out.vectors.rows(); ++k) {
    Eigen::VectorXd v = out.vectors.row(k).transpose();
    for (Eigen::Index r = 0; r < k; ++r) v -= out.vectors.row(r).dot(v) * out.vectors.row(r).transpose();
    v.normalize();
    canonical_sign(v);
    out.vectors.row(k) = v.transpose();
  }
  return out;
}

Eigen::VectorXd pointwise_median(const RowMatrix& x) {
  Eigen::VectorXd med(x.cols());
  std::vector<double> column(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) column[static_cast<std::size_t>(i)] = x(i, j);
    med[j] = median_inplace(column);
  }
  return med;
}

double mad_of(const Eigen::VectorXd& proj, std::vector<double>& scratch) {
  scratch.assign(proj.data(), proj.data() + proj.size());
  const double med = median_inplace(scratch);
  for (Eigen::Index i = 0; i < proj.size(); ++i) scratch[static_cast<std::size_t>(i)] = std::abs(proj[i] - med);
  return median_inplace(scratch);
}

void orthogonalize(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v -= b.dot(v) * b;
}

// Maximizes the MAD of (cos t)a + (sin t)b over t in [-width, width] by
// golden-section search; returns the best t seen (0 unless it strictly improves).
double golden_rotation(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double width, double current,
                       std::vector<double>& scratch) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto value = [&](double t) {
    const Eigen::VectorXd proj = std::cos(t) * a + std::sin(t) * b;
    return mad_of(proj, scratch);
  };
  double lo = -width;
  double hi = width;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  double best_t = 0.0;
  double best_f = current;
  auto consider = [&](double t, double f) {
    if (f > best_f) {
      best_f = f;
      best_t = t;
    }
  };
  consider(x1, f1);
  consider(x2, f2);
  for (int iter = 0; iter < 32; ++iter) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = value(x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = value(x2);
      consider(x2, f2);
    }
  }
  return best_t;
}

}  // namespace

PcaModel fit_pca(const FunctionalSample& sample, std::size_t p) {
  check_components(sample, p);
  const RowMatrix& x = sample.values();
  if (all_curves_identical(x)) throw Error(Errc::DegenerateSample, "all curves are identical");

  PcaModel model;
  model.kind = PcaKind::Classical;
  model.mean = x.colwise().mean().transpose();
  const RowMatrix centered = x.rowwise() - model.mean.transpose();
  Eigenpairs eig = covariance_eigenpairs(centered, p);
  if (!(eig.total > 0.0)) throw Error(Errc::DegenerateSample, "zero total variance");
  model.loadings = std::move(eig.vectors);
  model.var_ratios.resize(p);
  for (std::size_t k = 0; k < p; ++k)
    model.var_ratios[k] = eig.values[static_cast<Eigen::Index>(k)] / eig.total;
  return model;
}

double mad_criterion(const RowMatrix& data, const Eigen::VectorXd& direction) {
  if (data.cols() != direction.size())
    throw Error(Errc::DimensionMismatch, "direction length does not match the curve length");
  std::vector<double> scratch;
  const Eigen::VectorXd proj = data * direction;
  return mad_of(proj, scratch);
}

PcaModel fit_robust_pca(const FunctionalSample& sample, std::size_t p, std::uint64_t seed,
                        const RobustPcaOptions& options) {
  check_components(sample, p);
  const RowMatrix& x = sample.values();
  if (all_curves_identical(x)) throw Error(Errc::DegenerateSample, "all curves are identical");

  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  PcaModel model;
  model.kind = PcaKind::Robust;
  model.seed = seed;
  model.mean = pointwise_median(x);
  const RowMatrix centered = x.rowwise() - model.mean.transpose();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> found;
  std::vector<double> criteria;
  std::vector<double> scratch;
  RowMatrix deflated = centered;

  for (std::size_t k = 0; k < p; ++k) {
    std::vector<Eigen::VectorXd> candidates;
    candidates.reserve(static_cast<std::size_t>(n) + options.random_directions + 1);

    // Classical leading direction of the deflated data seeds the search.
    {
      const RowMatrix recentered = deflated.rowwise() - deflated.colwise().mean();
      if (recentered.squaredNorm() > 0.0) {
        Eigen::VectorXd v = covariance_eigenpairs(recentered, 1).vectors.row(0).transpose();
        orthogonalize(v, found);
        if (v.norm() > 1e-8) candidates.push_back(v.normalized());
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd v = deflated.row(i).transpose();
      orthogonalize(v, found);
      if (v.norm() > 1e-12) candidates.push_back(v.normalized());
    }
    for (std::size_t r = 0; r < options.random_directions; ++r) {
      Eigen::VectorXd v(m);
      for (Eigen::Index c = 0; c < m; ++c) v[c] = gauss(rng);
      orthogonalize(v, found);
      if (v.norm() > 1e-12) candidates.push_back(v.normalized());
    }
    if (candidates.empty()) candidates.push_back(complement_vector(RowMatrix(0, m), 0, m));

    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double value = mad_of(centered * candidates[c], scratch);
      if (value > best_value) {
        best_value = value;
        best = c;
      }
    }
    Eigen::VectorXd u = candidates[best];
    if (k == 0 && !(best_value > 0.0))
      throw Error(Errc::DegenerateSample, "robust spread is zero in every candidate direction");

    // Coordinate-wise rotations of u towards each (deflated) axis.
    Eigen::VectorXd a = centered * u;
    double width = std::numbers::pi / 4.0;
    for (std::size_t sweep = 0; sweep < options.refinement_sweeps && best_value > 0.0; ++sweep) {
      for (Eigen::Index c = 0; c < m; ++c) {
        Eigen::VectorXd w = Eigen::VectorXd::Unit(m, c);
        orthogonalize(w, found);
        w -= u.dot(w) * u;
        const double norm = w.norm();
        if (norm < 1e-8) continue;
        w /= norm;
        const Eigen::VectorXd b = centered * w;
        const double t = golden_rotation(a, b, width, best_value, scratch);
        if (t == 0.0) continue;
        Eigen::VectorXd rotated = std::cos(t) * u + std::sin(t) * w;
        orthogonalize(rotated, found);
        rotated.normalize();
        const double value = mad_of(centered * rotated, scratch);
        if (value > best_value) {
          u = rotated;
          a = centered * u;
          best_value = value;
        }
      }
      width /= 4.0;
    }

    canonical_sign(u);
    found.push_back(u);
    criteria.push_back(best_value);
    deflated -= (deflated * u) * u.transpose();
  }

  double total = 0.0;
  for (double s : criteria) total += s * s;
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd col = deflated.col(j);
    const double s = mad_of(col, column);
    total += s * s;
  }

  model.loadings.resize(static_cast<Eigen::Index>(p), m);
  model.var_ratios.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    model.loadings.row(static_cast<Eigen::Index>(k)) = found[k].transpose();
    model.var_ratios[k] = total > 0.0 ? criteria[k] * criteria[k] / total : 0.0;
  }
  return model;
}

RowMatrix scores(const PcaModel& model, const FunctionalSample& sample) {
  if (sample.points() != model.points())
    throw Error(Errc::DimensionMismatch, "model has " + std::to_string(model.points()) +
                                             " points, sample has " + std::to_string(sample.points()));
  const RowMatrix centered = sample.values().rowwise() - model.mean.transpose();
  return centered * model.loadings.transpose();
}

PointCloud2D project(const PcaModel& model, const FunctionalSample& sample) {
  if (model.components() < 2)
    throw Error(Errc::DimensionMismatch, "a 2D projection needs at least 2 components");
  const RowMatrix s = scores(model, sample);
  PointCloud2D cloud;
  cloud.points.reserve(sample.size());
  for (Eigen::Index i = 0; i < s.rows(); ++i) cloud.points.emplace_back(s(i, 0), s(i, 1));
  return cloud;
}

Eigen::VectorXd reconstruct(const PcaModel& model, const Eigen::VectorXd& scores) {
  if (static_cast<std::size_t>(scores.size()) != model.components())
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(model.components()) + " scores, got " +
                                             std::to_string(scores.size()));
  return model.mean + model.loadings.transpose() * scores;
}

Eigen::VectorXd reconstruct2(const PcaModel& model, const Point2& scores) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.components()));
  if (full.size() < 2) throw Error(Errc::DimensionMismatch, "model has fewer than 2 components");
  full.head<2>() = scores;
  return reconstruct(model, full);
}

void to_json(nlohmann::json& j, const PcaModel& model) {
  j = nlohmann::json::object();
  j["kind"] = model.kind == PcaKind::Classical ? "classical" : "robust";
  j["var_ratio_basis"] = model.kind == PcaKind::Classical ? "covariance_eigenvalue" : "mad_criterion";
  j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
  auto rows = nlohmann::json::array();
  for (Eigen::Index k = 0; k < model.loadings.rows(); ++k) {
    const Eigen::VectorXd row = model.loadings.row(k).transpose();
    rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  j["loadings"] = std::move(rows);
  j["var_ratios"] = model.var_ratios;
  j["seed"] = model.seed ? nlohmann::json(*model.seed) : nlohmann::json(nullptr);
}

}  // namespace fundepth
