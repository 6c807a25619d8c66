#pragma once

// One-dimensional standard and truncated normal primitives.
//
// Everything above this layer (coupling envelopes, conditional updates)
// subtracts nearby values of Phi, so the functions here keep differences
// and ratios of tail masses in log space where that matters.

namespace boxcftp {

/// Normal law N(mu, sigma^2) conditioned to [a, b].
struct TruncNorm1D {
  double mu = 0.0;
  double sigma = 1.0;
  double a = -1.0;
  double b = 1.0;

  /// Throws DomainError unless sigma > 0 and a < b are finite.
  void validate() const;
};

/// Standard normal density phi(x).
double std_normal_pdf(double x);

/// Phi(x), via erfc; absolute error around 1e-16.
double std_normal_cdf(double x);

/// Phi^{-1}(p) for p in (0, 1). Throws DomainError otherwise.
double std_normal_quantile(double p);

/// log(Phi(hi) - Phi(lo)) for lo < hi, accurate when both arguments sit
/// far out in the same tail. Infinite endpoints are accepted.
double log_cdf_diff(double lo, double hi);

/// log(1 - Phi(x)) without underflow for large x.
double log_upper_tail(double x);

/// A_{a,b}(mu) = Phi(b - mu) - Phi(a - mu).
double interval_mass(double mu, double a, double b);

double trunc_pdf(const TruncNorm1D& t, double x);
double trunc_log_pdf(const TruncNorm1D& t, double x);
double trunc_cdf(const TruncNorm1D& t, double x);

/// Generalized inverse of trunc_cdf: smallest x in [a, b] with
/// trunc_cdf(x) >= p. Returns a for p = 0 and b for p = 1.
double trunc_quantile(const TruncNorm1D& t, double p);

}  // namespace boxcftp
