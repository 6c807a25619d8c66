#pragma once

// Kolmogorov-Smirnov statistics with the asymptotic alpha = 0.01 critical
// value c = 1.628.

#include <functional>
#include <span>

namespace boxcftp {

inline constexpr double kKsCritical01 = 1.628;

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;

  bool passes() const { return statistic < threshold; }
};

/// sup |F_a - F_b|; threshold c * sqrt((m + n) / (m n)). DomainError on
/// empty input.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// sup |F_n - F|; threshold c / sqrt(n).
KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);

}  // namespace boxcftp
