#include "boxcftp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "boxcftp/errors.hpp"

namespace boxcftp {
namespace {

template <unsigned N>
QuadratureRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  QuadratureRule r;
  // Boost stores the non-negative half; a leading zero is the odd-order centre.
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    r.nodes.push_back(-x[i]);
    r.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(x[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

void require_low_dim(const GaussianSpec& spec, const char* what) {
  if (spec.dim() > kMaxQuadratureDim) {
    std::ostringstream os;
    os << what << ": tensor quadrature supports d <= " << kMaxQuadratureDim << ", got d = "
       << spec.dim();
    throw UnsupportedError(os.str());
  }
}

// Sum over the tensor grid of the coordinates other than `skip` (all of
// them when skip >= d), with x[skip] held fixed.
double integrate_others(const GaussianSpec& spec, std::span<const QuadratureRule> rules,
                        std::size_t skip, std::vector<double>& x, double q_ref) {
  const std::size_t d = spec.dim();
  std::vector<std::size_t> axes;
  for (std::size_t i = 0; i < d; ++i)
    if (i != skip) axes.push_back(i);
  if (axes.empty()) return std::exp(-0.5 * (quadratic_form(spec, x) - q_ref));

  std::vector<std::size_t> idx(axes.size(), 0);
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      x[axes[j]] = rules[axes[j]].nodes[idx[j]];
      w *= rules[axes[j]].weights[idx[j]];
    }
    total += w * std::exp(-0.5 * (quadratic_form(spec, x) - q_ref));
    std::size_t j = 0;
    while (j < axes.size() && ++idx[j] == rules[axes[j]].nodes.size()) idx[j++] = 0;
    if (j == axes.size()) break;
  }
  return total;
}

std::vector<QuadratureRule> box_rules(const GaussianSpec& spec, std::size_t panels) {
  std::vector<QuadratureRule> rules;
  for (std::size_t i = 0; i < spec.dim(); ++i)
    rules.push_back(composite_rule(spec.box(i).lo, spec.box(i).hi, panels, 64));
  return rules;
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
  static const QuadratureRule r8 = make_rule<8>();
  static const QuadratureRule r16 = make_rule<16>();
  static const QuadratureRule r32 = make_rule<32>();
  static const QuadratureRule r64 = make_rule<64>();
  switch (n) {
    case 8: return r8;
    case 16: return r16;
    case 32: return r32;
    case 64: return r64;
    default: throw DomainError("gauss_legendre: supported orders are 8, 16, 32, 64");
  }
}

QuadratureRule composite_rule(double lo, double hi, std::size_t panels, std::size_t n) {
  if (!(lo < hi) || panels == 0) throw DomainError("composite_rule: need lo < hi and panels >= 1");
  const QuadratureRule& base = gauss_legendre(n);
  QuadratureRule r;
  const double h = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      r.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
      r.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return r;
}

double box_integral(const GaussianSpec& spec, double q_ref, std::size_t panels) {
  require_low_dim(spec, "box_integral");
  const auto rules = box_rules(spec, panels);
  std::vector<double> x(spec.dim());
  return integrate_others(spec, rules, spec.dim(), x, q_ref);
}

std::vector<double> quadrature_marginal(const GaussianSpec& spec, std::size_t k,
                                        std::span<const double> grid) {
  require_low_dim(spec, "quadrature_marginal");
  if (k >= spec.dim()) throw DomainError("quadrature_marginal: coordinate out of range");
  const double q_ref = maximize_density_on_box(spec).quadratic_form;
  const auto rules = box_rules(spec, 1);
  std::vector<double> x(spec.dim());

  // Normalize over [a_k, b_k] with a composite rule on the same inner grid.
  const QuadratureRule outer = composite_rule(spec.box(k).lo, spec.box(k).hi, 64, 8);
  double mass = 0.0;
  for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
    x[k] = outer.nodes[i];
    mass += outer.weights[i] * integrate_others(spec, rules, k, x, q_ref);
  }

  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) {
    if (!spec.box(k).contains(g)) {
      out.push_back(0.0);
      continue;
    }
    x[k] = g;
    out.push_back(integrate_others(spec, rules, k, x, q_ref) / mass);
  }
  return out;
}

MarginalCdf::MarginalCdf(const GaussianSpec& spec, std::size_t k, std::size_t panels) {
  require_low_dim(spec, "MarginalCdf");
  if (k >= spec.dim()) throw DomainError("MarginalCdf: coordinate out of range");
  if (panels == 0) throw DomainError("MarginalCdf: need at least one panel");
  const double q_ref = maximize_density_on_box(spec).quadratic_form;
  const auto rules = box_rules(spec, 1);
  const QuadratureRule& base = gauss_legendre(8);
  std::vector<double> x(spec.dim());
  auto density = [&](double v) {
    x[k] = v;
    return integrate_others(spec, rules, k, x, q_ref);
  };

  const double lo = spec.box(k).lo;
  const double h = spec.box(k).width() / static_cast<double>(panels);
  edges_.resize(panels + 1);
  cdf_.assign(panels + 1, 0.0);
  pdf_.resize(panels + 1);
  double first_moment = 0.0;
  for (std::size_t p = 0; p <= panels; ++p) {
    edges_[p] = p == panels ? spec.box(k).hi : lo + static_cast<double>(p) * h;
    pdf_[p] = density(edges_[p]);
  }
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = 0.5 * (edges_[p] + edges_[p + 1]);
    const double half = 0.5 * (edges_[p + 1] - edges_[p]);
    double s = 0.0;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      const double v = mid + half * base.nodes[i];
      const double f = base.weights[i] * half * density(v);
      s += f;
      first_moment += f * v;
    }
    cdf_[p + 1] = cdf_[p] + s;
  }
  mass_ = cdf_.back();
  mean_ = first_moment / mass_;
  for (auto& c : cdf_) c /= mass_;
  for (auto& f : pdf_) f /= mass_;
}

double MarginalCdf::operator()(double x) const {
  if (x <= edges_.front()) return 0.0;
  if (x >= edges_.back()) return 1.0;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const auto p = static_cast<std::size_t>(it - edges_.begin()) - 1;
  const double h = edges_[p + 1] - edges_[p];
  const double t = (x - edges_[p]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double v = (2 * t3 - 3 * t2 + 1) * cdf_[p] + (t3 - 2 * t2 + t) * h * pdf_[p] +
                   (-2 * t3 + 3 * t2) * cdf_[p + 1] + (t3 - t2) * h * pdf_[p + 1];
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace boxcftp
