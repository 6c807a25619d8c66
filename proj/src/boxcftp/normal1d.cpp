#include "boxcftp/normal1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "boxcftp/errors.hpp"

namespace boxcftp {
namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490392848;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176398614;

// Both endpoints beyond this many standard deviations on the same side
// switch log_cdf_diff to tail arithmetic.
constexpr double kTailSwitch = 5.0;

// erfc(x / sqrt 2) stays a normal double comfortably below this.
constexpr double kErfcRange = 26.0;

double upper_tail(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// Laplace continued fraction for Mills' ratio, Q(x) = phi(x) * cf(x).
double mills_ratio_cf(double x) {
  double t = x;
  for (int k = 60; k >= 1; --k) t = x + k / t;
  return 1.0 / t;
}

double bisect_trunc_quantile(const TruncNorm1D& t, double p) {
  double lo = t.a;
  double hi = t.b;
  for (int i = 0; i < 200; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (trunc_cdf(t, mid) >= p)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

void TruncNorm1D::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu) ||
      !std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    std::ostringstream os;
    os << "invalid truncated normal (mu=" << mu << ", sigma=" << sigma
       << ", a=" << a << ", b=" << b << ")";
    throw DomainError(os.str());
  }
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "std_normal_quantile: p=" << p << " outside (0,1)";
    throw DomainError(os.str());
  }
  // 1 - p is exact for p >= 0.5, so the upper half never loses the tail.
  if (p <= 0.5)
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double log_upper_tail(double x) {
  if (x < 0.0) return std::log1p(-upper_tail(-x));
  if (x < kErfcRange) return std::log(upper_tail(x));
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio_cf(x));
}

double log_cdf_diff(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    std::ostringstream os;
    os << "log_cdf_diff: need lo < hi, got lo=" << lo << ", hi=" << hi;
    throw DomainError(os.str());
  }
  if (hi <= 0.0) return log_cdf_diff(-hi, -lo);

  if ((hi - lo) * std::max(1.0, hi) <= 1.0) {
    // Narrow interval: any difference of tails cancels, so integrate phi
    // directly, scaled by phi(lo). The integrand stays within [e^-1, 1].
    const double base = std::max(lo, 0.0);
    const double scaled = boost::math::quadrature::gauss<double, 16>::integrate(
        [base](double x) { return std::exp(-0.5 * (x - base) * (x + base)); }, lo, hi);
    return -0.5 * base * base - kLogSqrt2Pi + std::log(scaled);
  }

  if (lo < 0.0) {
    // Straddles zero: both erf terms are positive, nothing cancels.
    return std::log(0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2)));
  }

  if (lo > kTailSwitch) {
    const double log_lo = log_upper_tail(lo);
    const double log_hi = log_upper_tail(hi);
    return log_lo + std::log(-std::expm1(log_hi - log_lo));
  }
  return std::log(upper_tail(lo) - upper_tail(hi));
}

double interval_mass(double mu, double a, double b) {
  if (!(a < b)) {
    std::ostringstream os;
    os << "interval_mass: need a < b, got a=" << a << ", b=" << b;
    throw DomainError(os.str());
  }
  return std::exp(log_cdf_diff(a - mu, b - mu));
}

double trunc_log_pdf(const TruncNorm1D& t, double x) {
  t.validate();
  if (!(x >= t.a && x <= t.b)) {
    std::ostringstream os;
    os << "trunc_pdf: x=" << x << " outside [" << t.a << ", " << t.b << "]";
    throw DomainError(os.str());
  }
  const double z = (x - t.mu) / t.sigma;
  const double log_mass = log_cdf_diff((t.a - t.mu) / t.sigma, (t.b - t.mu) / t.sigma);
  return -0.5 * z * z - kLogSqrt2Pi - std::log(t.sigma) - log_mass;
}

double trunc_pdf(const TruncNorm1D& t, double x) { return std::exp(trunc_log_pdf(t, x)); }

double trunc_cdf(const TruncNorm1D& t, double x) {
  t.validate();
  if (!(x >= t.a && x <= t.b)) {
    std::ostringstream os;
    os << "trunc_cdf: x=" << x << " outside [" << t.a << ", " << t.b << "]";
    throw DomainError(os.str());
  }
  if (x == t.a) return 0.0;
  if (x == t.b) return 1.0;
  const double alpha = (t.a - t.mu) / t.sigma;
  const double beta = (t.b - t.mu) / t.sigma;
  const double z = (x - t.mu) / t.sigma;
  if (z <= alpha) return 0.0;
  if (z >= beta) return 1.0;
  return std::min(1.0, std::exp(log_cdf_diff(alpha, z) - log_cdf_diff(alpha, beta)));
}

double trunc_quantile(const TruncNorm1D& t, double p) {
  t.validate();
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "trunc_quantile: p=" << p << " outside [0,1]";
    throw DomainError(os.str());
  }
  if (p == 0.0) return t.a;
  if (p == 1.0) return t.b;

  const double alpha = (t.a - t.mu) / t.sigma;
  const double beta = (t.b - t.mu) / t.sigma;
  const double mass = std::exp(log_cdf_diff(alpha, beta));

  // Invert on whichever side keeps the inner probability below 1/2 so that
  // it never has to be resolved against 1.
  const double lower_inner = std_normal_cdf(alpha) + p * mass;
  double z;
  if (lower_inner <= 0.5) {
    if (!(lower_inner > 1e-300) || !(mass > 0.0)) return bisect_trunc_quantile(t, p);
    z = std_normal_quantile(lower_inner);
  } else {
    const double upper_inner = std_normal_cdf(-beta) + (1.0 - p) * mass;
    if (!(upper_inner > 1e-300) || !(mass > 0.0) || !(upper_inner < 1.0))
      return bisect_trunc_quantile(t, p);
    z = -std_normal_quantile(upper_inner);
  }
  return std::clamp(t.mu + t.sigma * z, t.a, t.b);
}

}  // namespace boxcftp
