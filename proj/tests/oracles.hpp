#pragma once

// Reference computations for the tests. They avoid the library's numerical
// code paths: normal masses come from 50-digit erfc, envelopes from a brute
// force grid over the means, conditional laws from Schur complements of the
// covariance, and mean ranges from enumerating box corners.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Phi(hi) - Phi(lo) in 50-digit arithmetic, rounded to double.
double normal_mass(double lo, double hi);
/// Its logarithm, which stays finite where the mass underflows a double.
double log_normal_mass(double lo, double hi);

/// CDF of N(mu, sigma^2) truncated to [a, b].
double trunc_cdf(double mu, double sigma, double a, double b, double x);
double trunc_pdf(double mu, double sigma, double a, double b, double x);

/// Quantile by 50-digit bisection on the CDF.
double trunc_quantile(double mu, double sigma, double a, double b, double p);

/// inf over a grid of `points` means in [mu_lo, mu_hi] of the truncated
/// densities at x. Precomputes the truncation masses.
class GridEnvelope {
 public:
  GridEnvelope(double mu_lo, double mu_hi, double sigma, double a, double b, int points = 500);

  double density(double x) const;
  /// Where the two extreme-mean densities meet, by bisection.
  double crossing() const;
  /// integral over [a, x] of density(), adaptive Gauss-Kronrod on both
  /// sides of the crossing.
  double cdf(double x) const;
  double mass() const { return cdf(b_); }

 private:
  std::vector<double> mus_;
  std::vector<double> log_norm_;  // log(sigma * mass)
  double sigma_, a_, b_;
  double crossing_;
};

struct Conditional {
  double mean;
  double sd;
};

/// Law of x_k given the other coordinates, via the covariance.
Conditional conditional_from_covariance(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                                        std::size_t k, const Eigen::VectorXd& x);

/// Range of the conditional mean of x_k when the other coordinates range
/// over the box: every corner evaluated.
std::pair<double, double> mean_range_by_corners(const Eigen::MatrixXd& sigma,
                                                const Eigen::VectorXd& mu, std::size_t k,
                                                const std::vector<double>& lo,
                                                const std::vector<double>& hi);

/// R_k(B) from the covariance alone (corners plus the grid envelope).
double coupling_coefficient(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu, std::size_t k,
                            const std::vector<double>& lo, const std::vector<double>& hi);

/// integral over the box of f / (vol * max f), max taken on a dense grid
/// refined around the best node; d <= 2, adaptive nested Gauss-Kronrod.
double acceptance_probability_2d(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                                 const std::vector<double>& lo, const std::vector<double>& hi);

}  // namespace oracle
