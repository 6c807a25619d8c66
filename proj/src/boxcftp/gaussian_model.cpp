#include "boxcftp/gaussian_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "boxcftp/errors.hpp"

namespace boxcftp {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kInverseResidualTol = 1e-10;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

void check_shapes(const Eigen::VectorXd& mu, const Eigen::MatrixXd& m,
                  const std::vector<Interval>& box, const char* what) {
  const auto d = mu.size();
  if (d < 1) throw ConstructionError("dimension must be at least 1");
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream os;
    os << what << " is " << m.rows() << "x" << m.cols() << ", expected " << d << "x" << d;
    throw ConstructionError(os.str());
  }
  if (static_cast<Eigen::Index>(box.size()) != d) {
    std::ostringstream os;
    os << "box has " << box.size() << " intervals, expected " << d;
    throw ConstructionError(os.str());
  }
  if (!mu.allFinite()) throw ConstructionError("mean vector has non-finite entries");
  if (!m.allFinite()) throw ConstructionError(std::string(what) + " has non-finite entries");
  for (std::size_t k = 0; k < box.size(); ++k) {
    if (!std::isfinite(box[k].lo) || !std::isfinite(box[k].hi) || !(box[k].lo < box[k].hi)) {
      std::ostringstream os;
      os << "box interval " << k + 1 << " [" << box[k].lo << ", " << box[k].hi
         << "] must be bounded with lo < hi";
      throw ConstructionError(os.str());
    }
  }
}

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
  const double asym = max_abs(m - m.transpose());
  if (asym > kSymmetryTol * std::max(1.0, max_abs(m))) {
    std::ostringstream os;
    os << what << " is not symmetric (max |m - m'| = " << asym << ")";
    throw ConstructionError(os.str());
  }
}

// Cholesky factor of a symmetric matrix; throws unless numerically PD.
Eigen::LLT<Eigen::MatrixXd> factor_pd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Eigen::VectorXd pivots = Eigen::MatrixXd(llt.matrixL()).diagonal();
    const double scale = m.diagonal().cwiseAbs().maxCoeff();
    ok = (pivots.array().square() > 1e-14 * scale).all();
  }
  if (!ok) throw ConstructionError(std::string(what) + " is not positive definite");
  return llt;
}

double log_det_from(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

Eigen::MatrixXd symmetric_inverse(const Eigen::LLT<Eigen::MatrixXd>& llt, Eigen::Index d) {
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace

GaussianSpec GaussianSpec::from_covariance(Eigen::VectorXd mu, Eigen::MatrixXd covariance,
                                           std::vector<Interval> box) {
  check_shapes(mu, covariance, box, "covariance");
  check_symmetric(covariance, "covariance");
  const auto llt = factor_pd(covariance, "covariance");

  GaussianSpec spec;
  spec.precision_ = symmetric_inverse(llt, mu.size());
  spec.log_det_covariance_ = log_det_from(llt);
  spec.mu_ = std::move(mu);
  spec.covariance_ = std::move(covariance);
  spec.box_ = std::move(box);
  spec.finish();
  return spec;
}

GaussianSpec GaussianSpec::from_precision(Eigen::VectorXd mu, Eigen::MatrixXd precision,
                                          std::vector<Interval> box) {
  check_shapes(mu, precision, box, "precision");
  check_symmetric(precision, "precision");
  const auto llt = factor_pd(precision, "precision");

  GaussianSpec spec;
  spec.covariance_ = symmetric_inverse(llt, mu.size());
  spec.log_det_covariance_ = -log_det_from(llt);
  spec.mu_ = std::move(mu);
  spec.precision_ = std::move(precision);
  spec.box_ = std::move(box);
  spec.finish();
  return spec;
}

GaussianSpec GaussianSpec::from_pair(Eigen::VectorXd mu, Eigen::MatrixXd covariance,
                                     Eigen::MatrixXd precision, std::vector<Interval> box) {
  check_shapes(mu, covariance, box, "covariance");
  check_shapes(mu, precision, box, "precision");
  check_symmetric(covariance, "covariance");
  check_symmetric(precision, "precision");
  const auto llt = factor_pd(covariance, "covariance");

  GaussianSpec spec;
  spec.log_det_covariance_ = log_det_from(llt);
  spec.mu_ = std::move(mu);
  spec.covariance_ = std::move(covariance);
  spec.precision_ = std::move(precision);
  spec.box_ = std::move(box);
  spec.finish();
  return spec;
}

void GaussianSpec::finish() {
  const auto d = mu_.size();
  const Eigen::MatrixXd residual =
      precision_ * covariance_ - Eigen::MatrixXd::Identity(d, d);
  const double worst = max_abs(residual);
  if (!(worst <= kInverseResidualTol)) {
    std::ostringstream os;
    os << "precision and covariance are not mutually inverse (max residual " << worst << ")";
    throw ConstructionError(os.str());
  }
  sigma_hat_.resize(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    const double akk = precision_(k, k);
    if (!(akk > 0.0)) throw ConstructionError("precision has a non-positive diagonal entry");
    sigma_hat_[static_cast<std::size_t>(k)] = 1.0 / std::sqrt(akk);
  }
}

BoxState full_box_state(std::size_t dim) { return BoxState(dim, CoordState::full_range()); }

bool all_points(std::span<const CoordState> state) {
  return std::all_of(state.begin(), state.end(), [](const CoordState& c) { return c.is_point(); });
}

bool is_sub_box(std::span<const CoordState> inner, std::span<const CoordState> outer) {
  if (inner.size() != outer.size()) return false;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (outer[i].is_point() && !(inner[i] == outer[i])) return false;
  }
  return true;
}

ConditionalParams conditional_params(const GaussianSpec& spec, std::size_t k,
                                     std::span<const double> x) {
  const auto& p = spec.precision();
  const auto& mu = spec.mu();
  const auto kk = static_cast<Eigen::Index>(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    if (i == k) continue;
    const double a = p(static_cast<Eigen::Index>(i), kk);
    if (a == 0.0) continue;
    sum += a * (x[i] - mu(static_cast<Eigen::Index>(i)));
  }
  return {mu(kk) - sum / p(kk, kk), spec.sigma_hat(k)};
}

MeanInterval mean_bounds(const GaussianSpec& spec, std::size_t k,
                         std::span<const CoordState> state) {
  const auto& p = spec.precision();
  const auto& mu = spec.mu();
  const auto kk = static_cast<Eigen::Index>(k);
  // Same summation order and skip rule as conditional_params, so an
  // all-points state reproduces the exact conditional mean bit for bit.
  double sum_max = 0.0;
  double sum_min = 0.0;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    if (i == k) continue;
    const double a = p(static_cast<Eigen::Index>(i), kk);
    if (a == 0.0) continue;
    const double mu_i = mu(static_cast<Eigen::Index>(i));
    if (state[i].is_point()) {
      const double t = a * (state[i].value() - mu_i);
      sum_max += t;
      sum_min += t;
    } else {
      const double t_lo = a * (spec.box(i).lo - mu_i);
      const double t_hi = a * (spec.box(i).hi - mu_i);
      sum_max += std::max(t_lo, t_hi);
      sum_min += std::min(t_lo, t_hi);
    }
  }
  const double akk = p(kk, kk);
  return {mu(kk) - sum_max / akk, mu(kk) - sum_min / akk};
}

Envelope conditional_envelope(const GaussianSpec& spec, std::size_t k,
                              std::span<const CoordState> state) {
  return Envelope::build(mean_bounds(spec, k, state), spec.sigma_hat(k), spec.box(k).lo,
                         spec.box(k).hi);
}

double quadratic_form(const GaussianSpec& spec, std::span<const double> x) {
  const auto& p = spec.precision();
  const auto& mu = spec.mu();
  const auto d = static_cast<Eigen::Index>(spec.dim());
  double q = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double dj = x[static_cast<std::size_t>(j)] - mu(j);
    double row = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) row += p(i, j) * (x[static_cast<std::size_t>(i)] - mu(i));
    q += dj * row;
  }
  return q;
}

double log_density_unnormalized(const GaussianSpec& spec, std::span<const double> x) {
  const double d = static_cast<double>(spec.dim());
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * spec.log_det_covariance() -
         0.5 * quadratic_form(spec, x);
}

double density_unnormalized(const GaussianSpec& spec, std::span<const double> x) {
  return std::exp(log_density_unnormalized(spec, x));
}

BoxMaximum maximize_density_on_box(const GaussianSpec& spec) {
  const std::size_t d = spec.dim();
  std::vector<double> x(d);
  for (std::size_t k = 0; k < d; ++k)
    x[k] = std::clamp(spec.mu()(static_cast<Eigen::Index>(k)), spec.box(k).lo, spec.box(k).hi);

  // Each coordinate step is the exact 1-d minimizer of Q, projected on the box.
  constexpr int kMaxSweeps = 10'000'000;
  for (int sweep = 0;; ++sweep) {
    double change = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double next =
          std::clamp(conditional_params(spec, k, x).mu_hat, spec.box(k).lo, spec.box(k).hi);
      change = std::max(change, std::abs(next - x[k]));
      x[k] = next;
    }
    if (change < 1e-12) break;
    if (sweep >= kMaxSweeps)
      throw InvariantError("maximize_density_on_box: coordinate descent did not converge");
  }
  BoxMaximum out;
  out.quadratic_form = quadratic_form(spec, x);
  out.density = density_unnormalized(spec, x);
  out.argmax = std::move(x);
  return out;
}

double max_density_on_box(const GaussianSpec& spec) { return maximize_density_on_box(spec).density; }

}  // namespace boxcftp
