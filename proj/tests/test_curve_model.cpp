#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fundepth/curve_model.hpp"
#include "fundepth/error.hpp"
#include "support.hpp"

using namespace fundepth;

namespace {

Errc parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_curves(in, "mem.csv");
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return Errc::InvalidArgument;
}

std::string parse_message(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_curves(in, "mem.csv");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("grid line plus two curves") {
  std::istringstream in("0,1,2\n1,2,3\n4,5,6\n");
  const auto s = parse_curves(in);
  CHECK(s.size() == 2);
  CHECK(s.points() == 3);
  CHECK(s.values()(1, 2) == 6.0);
  CHECK(s.labels() == std::vector<std::string>{"c0001", "c0002"});
}

TEST_CASE("labels, header, comments and blank lines") {
  std::istringstream in("# ensemble\ntime,0,0.5,1\n\nrun_a,1,2,3\n  # note\nrun_b,4,5,6\n");
  const auto s = parse_curves(in);
  CHECK(s.size() == 2);
  CHECK(s.labels()[1] == "run_b");
  CHECK(s.grid()[1] == 0.5);
}

TEST_CASE("short row is reported with its line") {
  CHECK(parse_error("0,1,2\n1,2,3\n4,5\n") == Errc::RowLengthMismatch);
  CHECK(parse_message("0,1,2\n1,2,3\n4,5\n").find("mem.csv:3") != std::string::npos);
}

TEST_CASE("invalid inputs") {
  CHECK(parse_error("") == Errc::EmptyFile);
  CHECK(parse_error("# only comments\n") == Errc::EmptyFile);
  CHECK(parse_error("0,1,2\n") == Errc::EmptyFile);
  CHECK(parse_error("0,2,1\n1,2,3\n") == Errc::NonMonotoneGrid);
  CHECK(parse_error("0,1,1\n1,2,3\n") == Errc::NonMonotoneGrid);
  CHECK(parse_error("0,1,2\n1,nan,3\n") == Errc::NonFiniteValue);
  CHECK(parse_error("0,1,2\n1,inf,3\n") == Errc::NonFiniteValue);
  CHECK(parse_error("0,1,2\n1,2x,3\n") == Errc::InvalidNumber);
  CHECK(parse_error("0,1\na,1,2\na,3,4\n") == Errc::DuplicateLabel);
}

TEST_CASE("constructor invariants") {
  RowMatrix v(1, 1);
  v << 1.0;
  CHECK_THROWS_AS(FunctionalSample({0.0}, v), Error);
  RowMatrix w(1, 2);
  w << 1.0, 2.0;
  CHECK_THROWS_AS(FunctionalSample({0.0, 1.0, 2.0}, w), Error);
  CHECK_THROWS_AS(FunctionalSample({0.0, 1.0}, RowMatrix(0, 2)), Error);
}

TEST_CASE("file loading") {
  CHECK_THROWS_WITH_AS(load_curves("/nonexistent/dir/curves.csv"), doctest::Contains("/nonexistent/dir/curves.csv"),
                       Error);

  const auto path = std::filesystem::temp_directory_path() / "fundepth_test_237.csv";
  const auto big = testing::transient_ensemble(5, 100, 237, 0);
  save_curves(path, big);
  const auto loaded = load_curves(path);
  CHECK(loaded.size() == 100);
  CHECK(loaded.points() == 237);
  CHECK(loaded == big);

  const auto cut = truncate(loaded, 150);
  CHECK(cut.points() == 150);
  CHECK(cut.values()(99, 149) == big.values()(99, 149));
  std::filesystem::remove(path);
}

TEST_CASE("write/parse round trip is bit exact") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::normal_distribution<double> z(0.0, std::pow(10.0, rep % 7 - 3));
    RowMatrix v(5, 7);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = z(rng) / 3.0;
    std::vector<double> grid = testing::uniform_grid(7, 0.1, 1.0 / 3.0);
    const FunctionalSample s(grid, v);
    std::ostringstream out;
    write_curves(out, s);
    std::istringstream in(out.str());
    const auto back = parse_curves(in);
    CHECK(back == s);
  }
}

TEST_CASE("truncate") {
  std::mt19937_64 rng(3);
  const auto s = testing::random_sample(rng, 4, 10);
  CHECK(truncate(s, 10) == s);
  CHECK_THROWS_AS(truncate(s, 1), Error);
  CHECK_THROWS_AS(truncate(s, 11), Error);
  try {
    truncate(s, 1);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::KOutOfRange);
  }
  for (std::size_t k = 2; k <= 10; ++k)
    for (std::size_t j = 2; j <= k; ++j) CHECK(truncate(truncate(s, k), j) == truncate(s, j));
}
