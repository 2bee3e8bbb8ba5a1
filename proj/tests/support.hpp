#pragma once

// Shared generators and independent reference implementations for the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fundepth/curve_model.hpp"
#include "fundepth/reduction.hpp"

namespace testing {

using fundepth::FunctionalSample;
using fundepth::Point2;
using fundepth::PointCloud2D;
using fundepth::RowMatrix;

inline std::vector<double> uniform_grid(std::size_t m, double t0 = 0.0, double dt = 1.0) {
  std::vector<double> g(m);
  for (std::size_t t = 0; t < m; ++t) g[t] = t0 + dt * static_cast<double>(t);
  return g;
}

inline FunctionalSample random_sample(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::normal_distribution<double> z;
  RowMatrix v(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < m; ++t) v(i, t) = z(rng);
  return FunctionalSample(uniform_grid(m), std::move(v));
}

// Small-integer clouds are full of ties and collinear triples; Gaussian
// clouds are in general position.
inline PointCloud2D integer_cloud(std::mt19937_64& rng, std::size_t n, int range) {
  std::uniform_int_distribution<int> u(-range, range);
  PointCloud2D c;
  for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(u(rng), u(rng));
  return c;
}

inline PointCloud2D gaussian_cloud(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z;
  PointCloud2D c;
  for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(z(rng), z(rng));
  return c;
}

// Tukey depth by enumerating every critical half-plane: for each line through
// theta and another point, the four half-planes obtained by tilting the line
// slightly in either sense. O(n^2) per query. Exact for integer coordinates.
inline std::size_t brute_tukey_depth(const Point2& theta, const PointCloud2D& cloud) {
  std::size_t coincident = 0;
  std::vector<Point2> d;
  for (const auto& p : cloud.points) {
    if (p == theta)
      ++coincident;
    else
      d.push_back(p - theta);
  }
  if (d.empty()) return coincident;
  std::size_t best = d.size();
  for (const auto& a : d) {
    std::size_t left = 0, right = 0, fwd = 0, back = 0;
    for (const auto& b : d) {
      const double cr = a.x() * b.y() - a.y() * b.x();
      if (cr > 0)
        ++left;
      else if (cr < 0)
        ++right;
      else if (a.dot(b) > 0)
        ++fwd;
      else
        ++back;
    }
    best = std::min({best, left + fwd, left + back, right + fwd, right + back});
  }
  return coincident + best;
}

// Band-depth counts by listing every pair and checking every grid point.
inline std::vector<std::uint64_t> brute_bd2_counts(const RowMatrix& y) {
  const auto n = static_cast<std::size_t>(y.rows());
  std::vector<std::uint64_t> counts(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        bool inside = true;
        for (Eigen::Index t = 0; t < y.cols() && inside; ++t) {
          const double lo = std::min(y(j, t), y(k, t));
          const double hi = std::max(y(j, t), y(k, t));
          inside = lo <= y(i, t) && y(i, t) <= hi;
        }
        counts[i] += inside ? 1 : 0;
      }
  return counts;
}

// Cyclic Jacobi eigenvalue iteration; eigenvalues sorted descending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

inline Eigen::MatrixXd covariance(const RowMatrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd c = x.rowwise() - mean;
  return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

// BEMUSE-like ensemble: smooth transients t -> a*exp(-t/tau) + b*sin(...),
// with `outliers` curves of 10x dispersion appended at the end.
inline FunctionalSample transient_ensemble(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t outliers) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  const auto grid = uniform_grid(m, 0.0, 1.0);
  RowMatrix v(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const bool planted = i + outliers >= n;
    const double spread = planted ? 10.0 : 1.0;
    // Planted amplitudes sit at least 15 nominal sd from the bulk so the
    // plant is unambiguous.
    const double za = z(rng);
    const double a = 1000.0 + 60.0 * spread * (planted ? std::copysign(1.5 + std::abs(za), za) : za);
    const double tau = 40.0 * std::exp(0.08 * spread * z(rng));
    const double b = 30.0 * spread * z(rng);
    for (std::size_t t = 0; t < m; ++t) {
      const double s = grid[t];
      v(i, t) = 300.0 + a * (1.0 - std::exp(-s / tau)) * std::exp(-s / 120.0) + b * std::sin(s / 25.0);
    }
  }
  return FunctionalSample(grid, std::move(v));
}

}  // namespace testing
