#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace boson_chaos {

// Sum with a fixed binary reduction tree over index ranges; the result depends
// only on the order of `values`, never on how the values were produced.
inline double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Elementwise pairwise tree sum of equally sized series.
inline std::vector<double> pairwise_sum(std::span<const std::vector<double>> series) {
  if (series.empty()) return {};
  if (series.size() == 1) return series[0];
  const std::size_t half = series.size() / 2;
  auto left = pairwise_sum(series.first(half));
  const auto right = pairwise_sum(series.subspan(half));
  for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
  return left;
}

struct MeanError {
  double mean = 0.0;
  double sem = 0.0;  // standard error of the mean
  double stddev = 0.0;   // sample standard deviation
  std::size_t count = 0;
};

inline MeanError mean_error(std::span<const double> values) {
  MeanError out;
  out.count = values.size();
  if (values.empty()) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    out.sem = out.stddev / std::sqrt(static_cast<double>(values.size()));
  }
  return out;
}

}  // namespace boson_chaos
