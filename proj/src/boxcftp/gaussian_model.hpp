#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "boxcftp/envelope.hpp"

namespace boxcftp {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Normal law N(mu, Sigma) truncated to a bounded box. Immutable once built.
class GaussianSpec {
 public:
  /// Precision computed from a Cholesky factorization of `covariance`.
  static GaussianSpec from_covariance(Eigen::VectorXd mu, Eigen::MatrixXd covariance,
                                      std::vector<Interval> box);
  static GaussianSpec from_precision(Eigen::VectorXd mu, Eigen::MatrixXd precision,
                                     std::vector<Interval> box);
  /// Both matrices supplied (closed forms for built-in instances); they are
  /// checked to be mutually inverse within 1e-10 per entry.
  static GaussianSpec from_pair(Eigen::VectorXd mu, Eigen::MatrixXd covariance,
                                Eigen::MatrixXd precision, std::vector<Interval> box);

  std::size_t dim() const { return static_cast<std::size_t>(mu_.size()); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::MatrixXd& precision() const { return precision_; }
  const std::vector<Interval>& box() const { return box_; }
  const Interval& box(std::size_t k) const { return box_[k]; }
  /// Conditional standard deviation 1/sqrt(a_kk); independent of the other
  /// coordinates.
  double sigma_hat(std::size_t k) const { return sigma_hat_[k]; }
  double log_det_covariance() const { return log_det_covariance_; }

 private:
  GaussianSpec() = default;
  void finish();

  Eigen::VectorXd mu_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd precision_;
  std::vector<Interval> box_;
  std::vector<double> sigma_hat_;
  double log_det_covariance_ = 0.0;
};

/// One coordinate of the set-valued coalescence state: either the whole
/// ambient interval or a single pinned value.
class CoordState {
 public:
  constexpr CoordState() = default;
  static constexpr CoordState full_range() { return CoordState(); }
  static CoordState point(double v) { return CoordState(v); }

  bool is_point() const { return !std::isnan(value_); }
  bool is_full_range() const { return std::isnan(value_); }
  /// Meaningful only for points.
  double value() const { return value_; }

  friend bool operator==(const CoordState& l, const CoordState& r) {
    return (l.is_full_range() && r.is_full_range()) || l.value_ == r.value_;
  }

 private:
  explicit constexpr CoordState(double v) : value_(v) {}
  double value_ = std::numeric_limits<double>::quiet_NaN();
};

using BoxState = std::vector<CoordState>;

BoxState full_box_state(std::size_t dim);
bool all_points(std::span<const CoordState> state);
/// True when every pinned coordinate of `outer` is pinned to the same value
/// in `inner`, i.e. inner is a sub-box of outer.
bool is_sub_box(std::span<const CoordState> inner, std::span<const CoordState> outer);

struct ConditionalParams {
  double mu_hat;
  double sigma_hat;
};

/// Law of coordinate k given the others: N(mu_hat, sigma_hat^2) truncated to
/// box(k). x[k] is not read.
ConditionalParams conditional_params(const GaussianSpec& spec, std::size_t k,
                                     std::span<const double> x);

/// Tight range of the conditional mean of coordinate k over every x in the
/// sub-box described by `state` (state[k] is not read).
MeanInterval mean_bounds(const GaussianSpec& spec, std::size_t k,
                         std::span<const CoordState> state);

/// Envelope of the conditional laws of coordinate k over the sub-box.
Envelope conditional_envelope(const GaussianSpec& spec, std::size_t k,
                              std::span<const CoordState> state);

/// Q(x) = (x - mu)' Sigma^{-1} (x - mu).
double quadratic_form(const GaussianSpec& spec, std::span<const double> x);

/// Untruncated multivariate normal density f(x; mu, Sigma) and its log.
double density_unnormalized(const GaussianSpec& spec, std::span<const double> x);
double log_density_unnormalized(const GaussianSpec& spec, std::span<const double> x);

struct BoxMaximum {
  std::vector<double> argmax;
  double quadratic_form;  // Q at the argmax
  double density;         // f at the argmax
};

/// Maximizer of f over the box, by projected cyclic coordinate descent on Q.
BoxMaximum maximize_density_on_box(const GaussianSpec& spec);
double max_density_on_box(const GaussianSpec& spec);

}  // namespace boxcftp
