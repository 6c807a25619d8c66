#include "boxcftp/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "boxcftp/errors.hpp"
#include "boxcftp/normal1d.hpp"

namespace boxcftp {
namespace {

constexpr double kDegenerateWidth = 1e-12;  // in units of sigma
constexpr double kNestingTol = 1e-12;
constexpr double kMassTol = 1e-12;

// (Phi(hi) - Phi(lo)) / exp(log_norm), zero for an empty range.
double mass_fraction(double lo, double hi, double log_norm) {
  if (!(hi > lo)) return 0.0;
  return std::exp(log_cdf_diff(lo, hi) - log_norm);
}

TruncNorm1D branch(const Envelope& e, double mu) { return {mu, e.sigma(), e.a(), e.b()}; }

void require_in_range(const Envelope& e, double x, const char* op) {
  if (!(x >= e.a() && x <= e.b())) {
    std::ostringstream os;
    os << op << ": x=" << x << " outside [" << e.a() << ", " << e.b() << "]";
    throw DomainError(os.str());
  }
}

void require_nested(const Envelope& outer, const Envelope& inner) {
  const auto& o = outer.interval();
  const auto& i = inner.interval();
  const double tol =
      kNestingTol * (1.0 + std::max({std::abs(o.lo), std::abs(o.hi), outer.sigma()}));
  if (outer.sigma() != inner.sigma() || outer.a() != inner.a() || outer.b() != inner.b() ||
      !o.contains(i, tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "envelope nesting violated: inner [" << i.lo << ", " << i.hi
       << "] not inside outer [" << o.lo << ", " << o.hi << "] or (sigma, a, b) differ";
    throw PreconditionError(os.str());
  }
}

}  // namespace

Envelope Envelope::build(MeanInterval interval, double sigma, double a, double b) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(a) || !std::isfinite(b) ||
      !(a < b) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi) ||
      !(interval.lo <= interval.hi)) {
    std::ostringstream os;
    os << "invalid envelope (I=[" << interval.lo << ", " << interval.hi << "], sigma=" << sigma
       << ", a=" << a << ", b=" << b << ")";
    throw DomainError(os.str());
  }

  Envelope e;
  e.interval_ = interval;
  e.sigma_ = sigma;
  e.a_ = a;
  e.b_ = b;
  e.center_ = interval.lo + 0.5 * (interval.hi - interval.lo);
  e.degenerate_ = interval.width() < kDegenerateWidth * sigma;
  if (e.degenerate_) {
    e.r_total_ = 1.0;
    e.left_mass_ = 0.0;
    e.log_mass_lo_ = e.log_mass_hi_ = log_cdf_diff((a - e.center_) / sigma, (b - e.center_) / sigma);
    e.x_star_ = e.center_;
    return e;
  }

  const double mu_lo = interval.lo;
  const double mu_hi = interval.hi;
  e.log_mass_lo_ = log_cdf_diff((a - mu_lo) / sigma, (b - mu_lo) / sigma);
  e.log_mass_hi_ = log_cdf_diff((a - mu_hi) / sigma, (b - mu_hi) / sigma);

  const double x = 0.5 * (mu_lo + mu_hi) -
                   sigma * sigma / (mu_hi - mu_lo) * (e.log_mass_lo_ - e.log_mass_hi_);
  // Interior analytically; anything outside is roundoff.
  e.x_star_ = std::clamp(x, a, b);

  e.left_mass_ =
      mass_fraction((a - mu_hi) / sigma, (e.x_star_ - mu_hi) / sigma, e.log_mass_hi_);
  e.r_total_ = e.left_mass_ +
               mass_fraction((e.x_star_ - mu_lo) / sigma, (b - mu_lo) / sigma, e.log_mass_lo_);
  e.r_total_ = std::min(e.r_total_, 1.0);
  return e;
}

double Envelope::x_star() const {
  if (degenerate_) throw PreconditionError("x_star is undefined for a degenerate envelope");
  return x_star_;
}

double Envelope::mass_lo() const { return std::exp(log_mass_lo_); }
double Envelope::mass_hi() const { return std::exp(log_mass_hi_); }

double crossing_point(MeanInterval interval, double sigma, double a, double b) {
  if (!(interval.lo < interval.hi)) {
    std::ostringstream os;
    os << "crossing_point: degenerate mean interval [" << interval.lo << ", " << interval.hi << "]";
    throw DomainError(os.str());
  }
  const Envelope e = Envelope::build(interval, sigma, a, b);
  if (e.degenerate()) {
    throw DomainError("crossing_point: mean interval narrower than 1e-12 sigma");
  }
  return e.x_star();
}

double min_density(const Envelope& e, double x) {
  require_in_range(e, x, "min_density");
  if (e.degenerate()) return trunc_pdf(branch(e, e.center()), x);
  const double mu = x >= e.x_star() ? e.interval().lo : e.interval().hi;
  return trunc_pdf(branch(e, mu), x);
}

double envelope_cdf(const Envelope& e, double x) {
  require_in_range(e, x, "envelope_cdf");
  if (e.degenerate_) return trunc_cdf(branch(e, e.center_), x);
  if (x == e.b_) return e.r_total_;

  const double sigma = e.sigma_;
  const double mu_lo = e.interval_.lo;
  const double mu_hi = e.interval_.hi;
  if (x < e.x_star_) {
    return mass_fraction((e.a_ - mu_hi) / sigma, (x - mu_hi) / sigma, e.log_mass_hi_);
  }
  const double value =
      e.left_mass_ + mass_fraction((e.x_star_ - mu_lo) / sigma, (x - mu_lo) / sigma, e.log_mass_lo_);
  return std::min(value, e.r_total_);
}

double envelope_quantile(const Envelope& e, double u) {
  const double total = e.r_total();
  if (!(u >= 0.0 && u <= total)) {
    std::ostringstream os;
    os.precision(17);
    os << "envelope_quantile: u=" << u << " outside [0, " << total << "]";
    throw DomainError(os.str());
  }
  if (u == 0.0) return e.a();
  if (e.degenerate()) return trunc_quantile(branch(e, e.center()), u);
  if (u == total) return e.b();

  const double x_star = e.x_star();
  if (u == e.left_mass()) return x_star;
  if (u < e.left_mass()) {
    // Left of x* the envelope is the mu_hi truncated cdf itself.
    return std::min(trunc_quantile(branch(e, e.interval().hi), u), x_star);
  }
  const TruncNorm1D lo_law = branch(e, e.interval().lo);
  const double p = std::min(1.0, trunc_cdf(lo_law, x_star) + (u - e.left_mass()));
  return std::max(trunc_quantile(lo_law, p), x_star);
}

double d_function(const Envelope& outer, const Envelope& inner, double x) {
  require_nested(outer, inner);
  require_in_range(outer, x, "d_function");
  return envelope_cdf(inner, x) - envelope_cdf(outer, x) + outer.r_total();
}

double d_inverse(const Envelope& outer, const Envelope& inner, double u) {
  require_nested(outer, inner);
  const double r_outer = outer.r_total();
  const double r_inner = inner.r_total();
  if (!(u >= r_outer - kMassTol && u <= r_inner + kMassTol)) {
    std::ostringstream os;
    os.precision(17);
    os << "d_inverse: u=" << u << " outside [" << r_outer << ", " << r_inner << "]";
    throw DomainError(os.str());
  }
  if (u <= r_outer) return outer.a();

  // D is continuous and nondecreasing with D' = m_inner - m_outer >= 0.
  // Newton steps, falling back to bisection whenever a step leaves the
  // bracket or the slope vanishes.
  double lo = outer.a();
  double hi = outer.b();
  double x = lo + 0.5 * (hi - lo);
  for (int i = 0; i < 200; ++i) {
    const double f = envelope_cdf(inner, x) - envelope_cdf(outer, x) + r_outer - u;
    if (f == 0.0) return x;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double slope = min_density(inner, x) - min_density(outer, x);
    double next = slope > 0.0 ? x - f / slope : mid;
    if (!(next > lo && next < hi)) next = mid;
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
      return next;
    x = next;
  }
  return hi;
}

}  // namespace boxcftp
