#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fundepth {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Curve = std::vector<double>;

// n curves sampled on one shared, strictly increasing grid of m points.
// Immutable once constructed; the constructor enforces every invariant.
class FunctionalSample {
 public:
  FunctionalSample(std::vector<double> grid, RowMatrix values, std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t points() const noexcept { return grid_.size(); }

  std::span<const double> grid() const noexcept { return grid_; }
  const RowMatrix& values() const noexcept { return values_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::span<const double> curve(std::size_t i) const noexcept {
    return {values_.data() + i * points(), points()};
  }

  bool operator==(const FunctionalSample& other) const;

 private:
  std::vector<double> grid_;
  RowMatrix values_;
  std::vector<std::string> labels_;
};

enum class CurveClass { Central, Outer, Outlier };

enum class Method { HDR, Bagplot, BandDepth };

std::string_view to_string(CurveClass c);
std::string_view to_string(Method m);

// Per-curve classification together with the method that produced it.
struct Classification {
  Method method;
  std::vector<CurveClass> classes;

  std::vector<std::size_t> indices_of(CurveClass c) const;
};

// Default label for the i-th curve (0-based): c0001, c0002, ...
std::string default_label(std::size_t index);

// Parses the ensemble CSV format: the first record is the time grid, every
// following record is an optional label followed by m values. Lines starting
// with '#' and blank lines are ignored.
FunctionalSample parse_curves(std::istream& in, std::string_view source = "<stream>");
FunctionalSample load_curves(const std::filesystem::path& path);

void write_curves(std::ostream& out, const FunctionalSample& sample);
void save_curves(const std::filesystem::path& path, const FunctionalSample& sample);

// First k grid points of every curve.
FunctionalSample truncate(const FunctionalSample& sample, std::size_t k);

}  // namespace fundepth
