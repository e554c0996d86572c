#pragma once

// Shared helpers for the test suite: sample statistics and seeded parameter
// generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace jdsv::testing {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;  // from the sample fourth central moment
};

inline SampleMoments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  SampleMoments m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  // One correction pass removes the rounding of the naive sum.
  double correction = 0.0;
  for (double v : x) correction += v - m.mean;
  m.mean += correction / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m.mean) * (v - m.mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  m.variance = m2 * n / (n - 1.0);
  m.mean_se = std::sqrt(m.variance / n);
  m.variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return m;
}

/// Seeded generator of test parameters.
class ParamGen {
 public:
  explicit ParamGen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace jdsv::testing
