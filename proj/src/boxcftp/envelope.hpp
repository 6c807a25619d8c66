#pragma once

// Maximal-coupling envelope for the family of normals N(mu, sigma^2)
// truncated to [a, b], with mu ranging over an interval I = [mu_lo, mu_hi].
//
// The pointwise infimum of the family is attained at one of the two extreme
// means: the mu_hi density to the left of the crossing point x*, the mu_lo
// density to the right. The integral of that infimum up to x is R(x|I); its
// total is R(I), the probability that one uniform couples every member.

namespace boxcftp {

struct MeanInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const { return lo == hi; }
  double width() const { return hi - lo; }
  bool contains(const MeanInterval& inner, double tol = 0.0) const {
    return inner.lo >= lo - tol && inner.hi <= hi + tol;
  }
};

class Envelope {
 public:
  /// Intervals narrower than 1e-12 * sigma collapse to their midpoint.
  static Envelope build(MeanInterval interval, double sigma, double a, double b);

  const MeanInterval& interval() const { return interval_; }
  double sigma() const { return sigma_; }
  double a() const { return a_; }
  double b() const { return b_; }

  bool degenerate() const { return degenerate_; }
  /// Mean used when degenerate.
  double center() const { return center_; }
  /// Throws PreconditionError on a degenerate envelope.
  double x_star() const;

  /// A- and A+, masses of the untruncated mu_lo and mu_hi laws on [a, b].
  double mass_lo() const;
  double mass_hi() const;
  double log_mass_lo() const { return log_mass_lo_; }
  double log_mass_hi() const { return log_mass_hi_; }

  /// R(x*|I), the part of the envelope carried by the mu_hi branch.
  double left_mass() const { return left_mass_; }
  /// R(I).
  double r_total() const { return r_total_; }

 private:
  Envelope() = default;

  MeanInterval interval_;
  double sigma_ = 1.0;
  double a_ = 0.0;
  double b_ = 1.0;
  bool degenerate_ = true;
  double center_ = 0.0;
  double x_star_ = 0.0;
  double log_mass_lo_ = 0.0;
  double log_mass_hi_ = 0.0;
  double left_mass_ = 0.0;
  double r_total_ = 1.0;

  friend double envelope_cdf(const Envelope& e, double x);
};

/// Point where the mu_lo and mu_hi truncated densities cross.
/// Requires lo < hi; throws DomainError for a degenerate interval.
double crossing_point(MeanInterval interval, double sigma, double a, double b);

double min_density(const Envelope& e, double x);

/// R(x|I). Nondecreasing, 0 at a, r_total() at b.
double envelope_cdf(const Envelope& e, double x);

/// R(I).
inline double envelope_mass(const Envelope& e) { return e.r_total(); }

/// Unique x in [a, b] with R(x|I) = u, for u in [0, R(I)].
double envelope_quantile(const Envelope& e, double u);

/// D(x) = R(x|inner) - R(x|outer) + R(outer), the coupling CDF for the
/// increment gained by narrowing the mean interval from outer to inner.
/// inner's interval must sit inside outer's, with the same sigma, a, b.
double d_function(const Envelope& outer, const Envelope& inner, double x);

/// Smallest x with d_function(x) >= u, for u in [R(outer), R(inner)].
double d_inverse(const Envelope& outer, const Envelope& inner, double u);

}  // namespace boxcftp
