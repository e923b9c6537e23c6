#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace rdabs {

// Pairwise (tree) summation. Fixed reduction order makes sums bit-stable
// across worker counts.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct SampleStats {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  long count = 0;
};

inline SampleStats mean_and_stderr(std::span<const double> v) {
  SampleStats out;
  out.count = static_cast<long>(v.size());
  if (v.empty()) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) {
    const double d = x - out.mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(v.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

}  // namespace rdabs
