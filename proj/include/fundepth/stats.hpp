#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fundepth {

// Median of the values; averages the two middle order statistics for even
// sizes. Reorders `values`.
double median_inplace(std::vector<double>& values);

double median(std::span<const double> values);

// Linear-interpolation quantile (type 7). Reorders `values`.
double quantile_inplace(std::vector<double>& values, double q);

// Number of items making up a proportion `alpha` of `n`: ceil(alpha*n)
// without floating noise pushing exact products up (0.3*10 -> 3, not 4),
// clamped to [1, n].
std::size_t coverage_count(double alpha, std::size_t n);

double sample_stddev(std::span<const double> values);

}  // namespace fundepth
