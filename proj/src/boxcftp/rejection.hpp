#pragma once

// Uniform-box rejection baseline: propose x uniform in B and accept with
// probability f(x) / max_B f. Each attempt reads d + 1 uniforms.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "boxcftp/gaussian_model.hpp"

namespace boxcftp {

inline constexpr std::uint64_t kRejectionAttemptCap = 1'000'000'000;

struct RejectionResult {
  std::vector<double> sample;
  std::uint64_t attempts = 0;
  std::uint64_t uniforms_used = 0;  // (d + 1) * attempts
};

/// Spec with the box maximum of the density precomputed.
class RejectionSampler {
 public:
  explicit RejectionSampler(GaussianSpec spec);

  const GaussianSpec& spec() const { return spec_; }
  /// min over B of the quadratic form, i.e. the log of max_B f up to constants.
  double q_min() const { return q_min_; }

  /// Uses its own mt19937_64 stream seeded by `seed`. Throws
  /// NoCoalescenceError after `max_attempts` rejections.
  RejectionResult sample(std::uint64_t seed,
                         std::uint64_t max_attempts = kRejectionAttemptCap) const;

 private:
  GaussianSpec spec_;
  double q_min_;
};

RejectionResult rejection_sample(const GaussianSpec& spec, std::uint64_t seed);

enum class AcceptanceMethod { quadrature, monte_carlo };

struct AcceptanceEstimate {
  double p = 0.0;
  double std_error = 0.0;  // zero for quadrature
  AcceptanceMethod method = AcceptanceMethod::quadrature;
  std::uint64_t n = 0;  // Monte Carlo points, or quadrature nodes
};

/// p = integral_B f / (vol(B) max_B f). Quadrature is a 64-node-per-axis
/// tensor rule (UnsupportedError for d > 3); Monte Carlo averages
/// f(X) / max_B f over n uniform points.
AcceptanceEstimate acceptance_probability(const GaussianSpec& spec, AcceptanceMethod method,
                                          std::uint64_t n = 0, std::uint64_t seed = 0);

/// M = (d + 1) / p.
double expected_uniforms(const GaussianSpec& spec, double p);

}  // namespace boxcftp
