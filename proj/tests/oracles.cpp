#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {
namespace {

using mp = boost::multiprecision::cpp_bin_float_50;

mp mp_phi_diff(const mp& lo, const mp& hi) {
  const mp root2 = boost::multiprecision::sqrt(mp(2));
  // Use whichever tail keeps both terms small.
  if (lo >= 0) return (boost::multiprecision::erfc(lo / root2) - boost::multiprecision::erfc(hi / root2)) / 2;
  if (hi <= 0) return (boost::multiprecision::erfc(-hi / root2) - boost::multiprecision::erfc(-lo / root2)) / 2;
  return (boost::multiprecision::erf(hi / root2) - boost::multiprecision::erf(lo / root2)) / 2;
}

mp mp_trunc_cdf(double mu, double sigma, double a, double b, const mp& x) {
  if (x <= a) return 0;
  if (x >= b) return 1;
  const mp s(sigma);
  const mp alpha = (mp(a) - mu) / s;
  return mp_phi_diff(alpha, (x - mu) / s) / mp_phi_diff(alpha, (mp(b) - mu) / s);
}

long double ld_phi_diff(long double lo, long double hi) {
  using boost::math::erf;
  using boost::math::erfc;
  const long double root2 = std::sqrt(2.0L);
  if (lo >= 0) return (erfc(lo / root2) - erfc(hi / root2)) / 2;
  if (hi <= 0) return (erfc(-hi / root2) - erfc(-lo / root2)) / 2;
  return (erf(hi / root2) - erf(lo / root2)) / 2;
}

template <class F>
double gk(F f, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-12);
}

}  // namespace

double normal_mass(double lo, double hi) { return static_cast<double>(mp_phi_diff(mp(lo), mp(hi))); }

double log_normal_mass(double lo, double hi) {
  return static_cast<double>(boost::multiprecision::log(mp_phi_diff(mp(lo), mp(hi))));
}

double trunc_cdf(double mu, double sigma, double a, double b, double x) {
  return static_cast<double>(mp_trunc_cdf(mu, sigma, a, b, mp(x)));
}

double trunc_pdf(double mu, double sigma, double a, double b, double x) {
  if (x < a || x > b) return 0.0;
  const mp s(sigma);
  const mp mass = mp_phi_diff((mp(a) - mu) / s, (mp(b) - mu) / s);
  const mp z = (mp(x) - mu) / s;
  const mp pi = boost::math::constants::pi<mp>();
  return static_cast<double>(boost::multiprecision::exp(-z * z / 2) /
                             (boost::multiprecision::sqrt(2 * pi) * s * mass));
}

double trunc_quantile(double mu, double sigma, double a, double b, double p) {
  mp lo(a);
  mp hi(b);
  for (int i = 0; i < 200; ++i) {
    const mp mid = (lo + hi) / 2;
    if (mp_trunc_cdf(mu, sigma, a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<double>(hi);
}

GridEnvelope::GridEnvelope(double mu_lo, double mu_hi, double sigma, double a, double b, int points)
    : sigma_(sigma), a_(a), b_(b) {
  const int n = mu_hi > mu_lo ? points : 1;
  for (int i = 0; i < n; ++i) {
    const double mu = n == 1 ? mu_lo : mu_lo + (mu_hi - mu_lo) * i / (n - 1.0);
    mus_.push_back(mu);
    // Extended precision is plenty for the 500 grid masses and far cheaper
    // than 50 digits.
    log_norm_.push_back(static_cast<double>(std::log(sigma * ld_phi_diff((a - mu) / sigma, (b - mu) / sigma))));
  }
  // f(mu_hi, x) / f(mu_lo, x) is increasing in x; find where it crosses 1.
  auto diff = [&](double x) {
    const double zl = (x - mus_.front()) / sigma_;
    const double zh = (x - mus_.back()) / sigma_;
    return (-0.5 * zh * zh - log_norm_.back()) - (-0.5 * zl * zl - log_norm_.front());
  };
  double lo = a;
  double hi = b;
  for (int i = 0; i < 200 && n > 1; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (diff(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  crossing_ = n > 1 ? 0.5 * (lo + hi) : a;
}

double GridEnvelope::density(double x) const {
  if (x < a_ || x > b_) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mus_.size(); ++i) {
    const double z = (x - mus_[i]) / sigma_;
    best = std::min(best, -0.5 * z * z - log_norm_[i]);
  }
  return std::exp(best) / std::sqrt(2.0 * M_PI);
}

double GridEnvelope::crossing() const { return crossing_; }

double GridEnvelope::cdf(double x) const {
  x = std::clamp(x, a_, b_);
  auto f = [this](double t) { return density(t); };
  const double c = crossing_;
  return gk(f, a_, std::min(x, c)) + gk(f, c, std::max(x, c));
}

Conditional conditional_from_covariance(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                                        std::size_t k, const Eigen::VectorXd& x) {
  const auto d = sigma.rows();
  std::vector<Eigen::Index> rest;
  for (Eigen::Index i = 0; i < d; ++i)
    if (i != static_cast<Eigen::Index>(k)) rest.push_back(i);
  const auto kk = static_cast<Eigen::Index>(k);
  if (rest.empty()) return {mu(kk), std::sqrt(sigma(kk, kk))};
  const auto m = static_cast<Eigen::Index>(rest.size());
  Eigen::MatrixXd s22(m, m);
  Eigen::VectorXd s12(m);
  Eigen::VectorXd dx(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    s12(i) = sigma(kk, rest[i]);
    dx(i) = x(rest[i]) - mu(rest[i]);
    for (Eigen::Index j = 0; j < m; ++j) s22(i, j) = sigma(rest[i], rest[j]);
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(s22);
  const double mean = mu(kk) + s12.dot(lu.solve(dx));
  const double var = sigma(kk, kk) - s12.dot(lu.solve(s12));
  return {mean, std::sqrt(var)};
}

std::pair<double, double> mean_range_by_corners(const Eigen::MatrixXd& sigma,
                                                const Eigen::VectorXd& mu, std::size_t k,
                                                const std::vector<double>& lo,
                                                const std::vector<double>& hi) {
  const std::size_t d = lo.size();
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  const std::size_t others = d - 1;
  for (std::size_t mask = 0; mask < (std::size_t{1} << others); ++mask) {
    std::size_t bit = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (i == k) {
        x(static_cast<Eigen::Index>(i)) = 0.0;
        continue;
      }
      x(static_cast<Eigen::Index>(i)) = (mask >> bit++) & 1 ? hi[i] : lo[i];
    }
    const double m = conditional_from_covariance(sigma, mu, k, x).mean;
    mn = std::min(mn, m);
    mx = std::max(mx, m);
  }
  return {mn, mx};
}

double coupling_coefficient(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu, std::size_t k,
                            const std::vector<double>& lo, const std::vector<double>& hi) {
  const auto [mn, mx] = mean_range_by_corners(sigma, mu, k, lo, hi);
  Eigen::VectorXd x = mu;
  const double sd = conditional_from_covariance(sigma, mu, k, x).sd;
  return GridEnvelope(mn, mx, sd, lo[k], hi[k]).mass();
}

double acceptance_probability_2d(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                                 const std::vector<double>& lo, const std::vector<double>& hi) {
  const Eigen::MatrixXd p = sigma.inverse();
  auto q = [&](double x, double y) {
    const double u = x - mu(0);
    const double v = y - mu(1);
    return p(0, 0) * u * u + 2 * p(0, 1) * u * v + p(1, 1) * v * v;
  };
  // Minimum of the quadratic form: dense grid, then local refinement.
  double bx = lo[0], by = lo[1], best = q(bx, by);
  constexpr int kGrid = 400;
  for (int i = 0; i <= kGrid; ++i)
    for (int j = 0; j <= kGrid; ++j) {
      const double x = lo[0] + (hi[0] - lo[0]) * i / kGrid;
      const double y = lo[1] + (hi[1] - lo[1]) * j / kGrid;
      if (q(x, y) < best) best = q(x, y), bx = x, by = y;
    }
  double hx = (hi[0] - lo[0]) / kGrid, hy = (hi[1] - lo[1]) / kGrid;
  for (int round = 0; round < 60; ++round) {
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        const double x = std::clamp(bx + hx * i / 4, lo[0], hi[0]);
        const double y = std::clamp(by + hy * j / 4, lo[1], hi[1]);
        if (q(x, y) < best) best = q(x, y), bx = x, by = y;
      }
    hx *= 0.5;
    hy *= 0.5;
  }
  auto inner = [&](double x) {
    return gk([&](double y) { return std::exp(-0.5 * (q(x, y) - best)); }, lo[1], hi[1]);
  };
  const double integral = gk(inner, lo[0], hi[0]);
  return integral / ((hi[0] - lo[0]) * (hi[1] - lo[1]));
}

}  // namespace oracle
