#pragma once

// Tensor Gauss-Legendre oracles for low-dimensional boxes: the normalizing
// integral, the rejection acceptance probability and coordinate marginals.

#include <cstddef>
#include <span>
#include <vector>

#include "boxcftp/gaussian_model.hpp"

namespace boxcftp {

/// Largest dimension handled by the tensor rules.
inline constexpr std::size_t kMaxQuadratureDim = 3;

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; n must be 8, 16, 32 or 64.
const QuadratureRule& gauss_legendre(std::size_t n);

/// Composite rule on [lo, hi]: `panels` equal panels of the n-point rule.
QuadratureRule composite_rule(double lo, double hi, std::size_t panels, std::size_t n);

/// Integral over B of exp(-(Q(x) - q_ref)/2), the unnormalized density up
/// to a constant. Throws UnsupportedError for d > 3.
double box_integral(const GaussianSpec& spec, double q_ref, std::size_t panels = 1);

/// Marginal density of coordinate k under the truncated law, at each grid
/// point. Throws UnsupportedError for d > 3.
std::vector<double> quadrature_marginal(const GaussianSpec& spec, std::size_t k,
                                        std::span<const double> grid);

/// Marginal CDF of coordinate k, tabulated on 256 panels and interpolated
/// by cubic Hermite segments (values and densities at panel edges).
class MarginalCdf {
 public:
  MarginalCdf(const GaussianSpec& spec, std::size_t k, std::size_t panels = 256);

  double operator()(double x) const;
  double lo() const { return edges_.front(); }
  double hi() const { return edges_.back(); }
  /// Integral of the unnormalized marginal before normalization.
  double mass() const { return mass_; }
  double mean() const { return mean_; }

 private:
  std::vector<double> edges_;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
  double mass_ = 0.0;
  double mean_ = 0.0;
};

}  // namespace boxcftp
