#include "boxcftp/rejection.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "boxcftp/errors.hpp"
#include "boxcftp/quadrature.hpp"

namespace boxcftp {
namespace {

double uniform53(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

void uniform_point(const GaussianSpec& spec, std::mt19937_64& gen, std::vector<double>& x) {
  for (std::size_t k = 0; k < spec.dim(); ++k)
    x[k] = spec.box(k).lo + spec.box(k).width() * uniform53(gen);
}

}  // namespace

RejectionSampler::RejectionSampler(GaussianSpec spec)
    : spec_(std::move(spec)), q_min_(maximize_density_on_box(spec_).quadratic_form) {}

RejectionResult RejectionSampler::sample(std::uint64_t seed, std::uint64_t max_attempts) const {
  const std::size_t d = spec_.dim();
  std::mt19937_64 gen(seed);
  RejectionResult r;
  r.sample.resize(d);
  while (r.attempts < max_attempts) {
    ++r.attempts;
    uniform_point(spec_, gen, r.sample);
    const double u = uniform53(gen);
    // u < f(x) / max f, compared in log space; f's constant cancels.
    if (std::log(u) < -0.5 * (quadratic_form(spec_, r.sample) - q_min_)) {
      r.uniforms_used = (d + 1) * r.attempts;
      return r;
    }
  }
  std::ostringstream os;
  os << "rejection sampler: no acceptance in " << max_attempts << " attempts (seed " << seed << ")";
  throw NoCoalescenceError(os.str());
}

RejectionResult rejection_sample(const GaussianSpec& spec, std::uint64_t seed) {
  return RejectionSampler(spec).sample(seed);
}

AcceptanceEstimate acceptance_probability(const GaussianSpec& spec, AcceptanceMethod method,
                                          std::uint64_t n, std::uint64_t seed) {
  const double q_min = maximize_density_on_box(spec).quadratic_form;
  double volume = 1.0;
  for (const auto& iv : spec.box()) volume *= iv.width();

  AcceptanceEstimate est;
  est.method = method;
  if (method == AcceptanceMethod::quadrature) {
    est.p = box_integral(spec, q_min) / volume;
    est.n = static_cast<std::uint64_t>(std::pow(64.0, static_cast<double>(spec.dim())));
    return est;
  }

  if (n < 2) throw DomainError("acceptance_probability: Monte Carlo needs n >= 2");
  std::mt19937_64 gen(seed);
  std::vector<double> x(spec.dim());
  // Welford running moments.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    uniform_point(spec, gen, x);
    const double v = std::exp(-0.5 * (quadratic_form(spec, x) - q_min));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (v - mean);
  }
  est.p = mean;
  est.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  est.n = n;
  return est;
}

double expected_uniforms(const GaussianSpec& spec, double p) {
  if (!(p > 0.0) || p > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "expected_uniforms: acceptance probability " << p << " outside (0, 1]";
    throw DomainError(os.str());
  }
  return static_cast<double>(spec.dim() + 1) / p;
}

}  // namespace boxcftp
