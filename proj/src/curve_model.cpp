#include "fundepth/curve_model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "fundepth/error.hpp"

namespace fundepth {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

enum class NumberStatus { Ok, Invalid, NonFinite };

NumberStatus parse_number(std::string_view text, double& out) {
  if (text.empty()) return NumberStatus::Invalid;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc::result_out_of_range) return NumberStatus::NonFinite;
  if (ec != std::errc() || ptr != last) return NumberStatus::Invalid;
  return std::isfinite(out) ? NumberStatus::Ok : NumberStatus::NonFinite;
}

std::string where(std::string_view source, std::size_t line, std::size_t column = 0) {
  std::string s = std::string(source) + ":" + std::to_string(line);
  if (column > 0) s += ":" + std::to_string(column);
  return s;
}

}  // namespace

std::string_view to_string(CurveClass c) {
  switch (c) {
    case CurveClass::Central: return "central";
    case CurveClass::Outer: return "outer";
    case CurveClass::Outlier: return "outlier";
  }
  return "unknown";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::HDR: return "hdr";
    case Method::Bagplot: return "bagplot";
    case Method::BandDepth: return "banddepth";
  }
  return "unknown";
}

std::vector<std::size_t> Classification::indices_of(CurveClass c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == c) out.push_back(i);
  return out;
}

std::string default_label(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%04zu", index + 1);
  return buf;
}

FunctionalSample::FunctionalSample(std::vector<double> grid, RowMatrix values,
                                   std::vector<std::string> labels)
    : grid_(std::move(grid)), values_(std::move(values)), labels_(std::move(labels)) {
  const std::size_t m = grid_.size();
  if (m < 2) throw Error(Errc::KOutOfRange, "a sample needs at least 2 grid points");
  if (values_.rows() < 1) throw Error(Errc::EmptyFile, "a sample needs at least 1 curve");
  if (static_cast<std::size_t>(values_.cols()) != m)
    throw Error(Errc::RowLengthMismatch, "value matrix has " + std::to_string(values_.cols()) +
                                             " columns for a grid of " + std::to_string(m));
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(grid_[j]))
      throw Error(Errc::NonFiniteValue, "grid point " + std::to_string(j) + " is not finite");
    if (j > 0 && !(grid_[j] > grid_[j - 1]))
      throw Error(Errc::NonMonotoneGrid, "grid is not strictly increasing at index " + std::to_string(j));
  }
  if (!values_.allFinite()) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
      for (Eigen::Index j = 0; j < values_.cols(); ++j)
        if (!std::isfinite(values_(i, j)))
          throw Error(Errc::NonFiniteValue, "value at curve " + std::to_string(i) + ", point " +
                                                std::to_string(j) + " is not finite");
  }
  if (labels_.empty()) {
    labels_.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) labels_.push_back(default_label(i));
  }
  if (labels_.size() != size())
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(size()) + " labels, got " +
                                             std::to_string(labels_.size()));
  std::unordered_set<std::string_view> seen;
  for (const auto& label : labels_)
    if (!seen.insert(label).second) throw Error(Errc::DuplicateLabel, "duplicate curve label '" + label + "'");
}

bool FunctionalSample::operator==(const FunctionalSample& other) const {
  return grid_ == other.grid_ && values_.rows() == other.values_.rows() &&
         values_.cols() == other.values_.cols() && values_ == other.values_ && labels_ == other.labels_;
}

FunctionalSample parse_curves(std::istream& in, std::string_view source) {
  std::vector<double> grid;
  std::vector<double> flat;
  std::vector<std::string> labels;
  std::vector<bool> explicit_label;
  bool have_grid = false;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_fields(line);

    if (!have_grid) {
      double v = 0.0;
      // A non-numeric leading token on the grid line is a column header.
      if (fields.size() > 2 && parse_number(fields.front(), v) == NumberStatus::Invalid)
        fields.erase(fields.begin());
      for (std::size_t c = 0; c < fields.size(); ++c) {
        switch (parse_number(fields[c], v)) {
          case NumberStatus::Invalid:
            throw Error(Errc::InvalidNumber, where(source, line_no, c + 1) + ": '" + std::string(fields[c]) +
                                                 "' is not a number");
          case NumberStatus::NonFinite:
            throw Error(Errc::NonFiniteValue, where(source, line_no, c + 1) + ": grid value '" +
                                                  std::string(fields[c]) + "' is not finite");
          case NumberStatus::Ok:
            break;
        }
        if (!grid.empty() && !(v > grid.back()))
          throw Error(Errc::NonMonotoneGrid, where(source, line_no, c + 1) + ": grid value " +
                                                 std::string(fields[c]) + " does not exceed its predecessor");
        grid.push_back(v);
      }
      if (grid.size() < 2)
        throw Error(Errc::RowLengthMismatch, where(source, line_no) + ": the grid needs at least 2 points");
      have_grid = true;
      continue;
    }

    const std::size_t m = grid.size();
    std::size_t offset = 0;
    if (fields.size() == m + 1) {
      offset = 1;
    } else if (fields.size() != m) {
      throw Error(Errc::RowLengthMismatch, where(source, line_no) + ": expected " + std::to_string(m) +
                                               " values, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = offset; c < fields.size(); ++c) {
      double v = 0.0;
      switch (parse_number(fields[c], v)) {
        case NumberStatus::Invalid:
          throw Error(Errc::InvalidNumber, where(source, line_no, c + 1) + ": '" + std::string(fields[c]) +
                                               "' is not a number");
        case NumberStatus::NonFinite:
          throw Error(Errc::NonFiniteValue, where(source, line_no, c + 1) + ": value '" +
                                                std::string(fields[c]) + "' is not finite");
        case NumberStatus::Ok:
          break;
      }
      flat.push_back(v);
    }
    labels.emplace_back(offset ? std::string(fields.front()) : std::string());
    explicit_label.push_back(offset == 1);
  }

  if (!have_grid) throw Error(Errc::EmptyFile, std::string(source) + ": no grid line");
  if (labels.empty()) throw Error(Errc::EmptyFile, std::string(source) + ": no curve rows");

  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!explicit_label[i]) labels[i] = default_label(i);

  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto m = static_cast<Eigen::Index>(grid.size());
  RowMatrix values = Eigen::Map<const RowMatrix>(flat.data(), n, m);
  return FunctionalSample(std::move(grid), std::move(values), std::move(labels));
}

FunctionalSample load_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot open '" + path.string() + "'");
  return parse_curves(in, path.string());
}

void write_curves(std::ostream& out, const FunctionalSample& sample) {
  char buf[40];
  const auto grid = sample.grid();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", grid[j]);
    out << (j ? "," : "") << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out << sample.labels()[i];
    for (double v : sample.curve(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void save_curves(const std::filesystem::path& path, const FunctionalSample& sample) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::FileNotFound, "cannot write '" + path.string() + "'");
  write_curves(out, sample);
}

FunctionalSample truncate(const FunctionalSample& sample, std::size_t k) {
  if (k < 2 || k > sample.points())
    throw Error(Errc::KOutOfRange, "truncation length " + std::to_string(k) + " outside [2, " +
                                       std::to_string(sample.points()) + "]");
  std::vector<double> grid(sample.grid().begin(), sample.grid().begin() + static_cast<std::ptrdiff_t>(k));
  RowMatrix values = sample.values().leftCols(static_cast<Eigen::Index>(k));
  return FunctionalSample(std::move(grid), std::move(values), sample.labels());
}

}  // namespace fundepth
