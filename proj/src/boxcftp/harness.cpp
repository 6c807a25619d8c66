#include "boxcftp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "boxcftp/errors.hpp"
#include "boxcftp/ks.hpp"
#include "boxcftp/normal1d.hpp"
#include "boxcftp/quadrature.hpp"
#include "boxcftp/rejection.hpp"

namespace boxcftp {
namespace {

using nlohmann::json;

// Runs fn(i) for i in [0, n); results must be stored by index so the
// outcome does not depend on the thread count.
template <class Fn>
void parallel_for(std::uint64_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Independent stream for the rejection baseline.
std::uint64_t rejection_seed(std::uint64_t seed, std::uint64_t i) { return mix_seed(~seed, i); }

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double delta = v[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v[i] - mean);
  }
  m.mean = mean;
  if (v.size() > 1)
    m.std_error = std::sqrt(m2 / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CftpOptions cftp_options(Schedule schedule, Backoff backoff) {
  CftpOptions o;
  o.schedule = schedule;
  o.backoff = backoff;
  return o;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t cmd_sample(const GaussianSpec& spec, const SampleOptions& options,
                         std::ostream& out) {
  const std::size_t d = spec.dim();
  const CouplingContext ctx(spec);
  const CftpOptions cftp = cftp_options(options.schedule, options.backoff);

  std::vector<std::optional<SampleResult>> results(options.n);
  parallel_for(options.n, options.threads, [&](std::uint64_t i) {
    try {
      results[i] = perfect_sample(ctx, mix_seed(options.seed, i), cftp);
    } catch (const NoCoalescenceError&) {
      results[i].reset();
    }
  });

  for (std::size_t k = 0; k < d; ++k) out << 'x' << k + 1 << ',';
  out << "tau,n_uses,seed_i,status\n";
  std::uint64_t failures = 0;
  for (std::uint64_t i = 0; i < options.n; ++i) {
    const auto& r = results[i];
    if (r) {
      for (double x : r->sample) out << format_real(x) << ',';
      out << r->tau << ',' << r->n_uniform_uses << ',' << mix_seed(options.seed, i) << ",ok\n";
    } else {
      ++failures;
      for (std::size_t k = 0; k < d; ++k) out << ',';
      out << ",," << mix_seed(options.seed, i) << ",no_coalescence\n";
    }
  }
  return failures;
}

void cmd_rcoef(const GaussianSpec& spec, std::ostream& out) {
  const CouplingContext ctx(spec);
  out << "k,R\n";
  for (std::size_t k = 0; k < spec.dim(); ++k)
    out << k + 1 << ',' << format_real(ctx.full_envelope(k).r_total()) << '\n';
}

std::vector<BenchRecord> run_bench(const std::vector<NamedInstance>& instances,
                                   const BenchOptions& options) {
  if (options.reps == 0) throw DomainError("bench: reps must be at least 1");
  std::vector<BenchRecord> records;
  const CftpOptions cftp = cftp_options(options.schedule, options.backoff);

  for (const auto& inst : instances) {
    const std::size_t d = inst.spec.dim();
    if (!options.dims.empty() &&
        std::find(options.dims.begin(), options.dims.end(), d) == options.dims.end())
      continue;

    // Coupling from the past.
    {
      const auto t0 = std::chrono::steady_clock::now();
      const CouplingContext ctx(inst.spec);
      std::vector<std::optional<SampleResult>> runs(options.reps);
      parallel_for(options.reps, options.threads, [&](std::uint64_t i) {
        try {
          runs[i] = perfect_sample(ctx, mix_seed(options.seed, i), cftp);
        } catch (const NoCoalescenceError&) {
          runs[i].reset();
        }
      });
      std::vector<double> uses;
      std::vector<double> taus;
      for (const auto& r : runs) {
        if (!r) continue;
        uses.push_back(static_cast<double>(r->n_uniform_uses));
        taus.push_back(static_cast<double>(r->tau));
      }
      BenchRecord rec;
      rec.instance = inst.id;
      rec.d = d;
      rec.method = "cftp";
      rec.replications = uses.size();
      rec.failures = options.reps - uses.size();
      const Moments m = moments(uses);
      rec.mean_uniforms = m.mean;
      rec.std_error = m.std_error;
      if (!taus.empty()) rec.mean_tau = moments(taus).mean;
      if (options.timing) rec.wall_time = seconds_since(t0);
      records.push_back(rec);
    }

    // Uniform rejection, with the (d + 1)/p oracle.
    {
      const auto t0 = std::chrono::steady_clock::now();
      BenchRecord rec;
      rec.instance = inst.id;
      rec.d = d;
      rec.method = "rejection";
      const bool quadrature = d <= kMaxQuadratureDim;
      const AcceptanceEstimate p =
          acceptance_probability(inst.spec,
                                 quadrature ? AcceptanceMethod::quadrature : AcceptanceMethod::monte_carlo,
                                 options.oracle_mc_points, mix_seed(options.seed, ~0ull));
      rec.oracle_method = quadrature ? "quadrature" : "monte_carlo";
      std::uint64_t reps = 0;
      if (p.p > 0.0) {
        const double m_oracle = expected_uniforms(inst.spec, p.p);
        rec.oracle_uniforms = m_oracle;
        const double affordable = std::floor(options.rejection_budget / m_oracle);
        reps = static_cast<std::uint64_t>(std::min(static_cast<double>(options.reps), affordable));
      }

      const RejectionSampler sampler(inst.spec);
      std::vector<double> uses(reps, -1.0);
      parallel_for(reps, options.threads, [&](std::uint64_t i) {
        try {
          uses[i] = static_cast<double>(sampler.sample(rejection_seed(options.seed, i)).uniforms_used);
        } catch (const NoCoalescenceError&) {
          uses[i] = -1.0;
        }
      });
      std::vector<double> ok;
      for (double u : uses)
        if (u >= 0.0) ok.push_back(u);
      rec.replications = ok.size();
      rec.failures = reps - ok.size();
      const Moments m = moments(ok);
      rec.mean_uniforms = m.mean;
      rec.std_error = m.std_error;
      if (options.timing) rec.wall_time = seconds_since(t0);
      records.push_back(rec);
    }
  }
  return records;
}

namespace {

// RFC 4180 quoting; instance ids such as "table1:-4,0" carry commas.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << "instance,d,method,replications,mean_uniforms,stderr,mean_tau,wall_time,"
         "oracle_uniforms,oracle_method,failures\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : records) {
    out << csv_field(r.instance) << ',' << r.d << ',' << r.method << ',' << r.replications << ',';
    if (r.replications > 0)
      out << format_real(r.mean_uniforms) << ',' << format_real(r.std_error);
    else
      out << ',';
    out << ',' << opt(r.mean_tau) << ',' << opt(r.wall_time) << ',' << opt(r.oracle_uniforms) << ','
        << r.oracle_method << ',' << r.failures << '\n';
  }
}

void cmd_bench(const std::string& selector, const BenchOptions& options, std::ostream& out) {
  write_bench_csv(run_bench(bench_instances(selector), options), out);
}

EnvelopeOracleErrors check_envelope(const Envelope& outer, const Envelope& inner) {
  using boost::math::quadrature::gauss_kronrod;
  EnvelopeOracleErrors err;
  const double a = inner.a();
  const double b = inner.b();
  const MeanInterval iv = inner.interval();

  // min over a 500-point grid of means; the true infimum can only be lower.
  constexpr int kGrid = 500;
  constexpr int kPoints = 64;
  for (int j = 0; j < kPoints; ++j) {
    const double x = a + (b - a) * (j + 0.5) / kPoints;
    double grid_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
      const double mu = iv.degenerate() ? iv.lo : iv.lo + (iv.hi - iv.lo) * i / (kGrid - 1.0);
      grid_min = std::min(grid_min, trunc_pdf({mu, inner.sigma(), a, b}, x));
    }
    const double excess = min_density(inner, x) - grid_min;
    err.min_density = std::max(err.min_density, std::max(0.0, excess) / std::max(1.0, grid_min));
  }

  const auto f = [&](double x) { return min_density(inner, x); };
  const auto integral = [&](double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    return gauss_kronrod<double, 61>::integrate(f, lo, hi, 8, 1e-11);
  };
  const double split = inner.degenerate() ? a : inner.x_star();
  for (int j = 1; j <= 8; ++j) {
    const double x = std::min(b, a + (b - a) * j / 8.0);
    const double ref = integral(a, std::min(x, split)) + integral(split, std::max(x, split));
    err.cdf = std::max(err.cdf, std::abs(envelope_cdf(inner, x) - ref) / std::max(1.0, ref));
  }

  const double r_in = inner.r_total();
  for (int j = 0; j < 32; ++j) {
    const double u = r_in * (j + 0.5) / 32.0;
    err.quantile_roundtrip =
        std::max(err.quantile_roundtrip, std::abs(envelope_cdf(inner, envelope_quantile(inner, u)) - u));
  }

  const double r_out = outer.r_total();
  if (r_in - r_out > 1e-12) {
    for (int j = 0; j < 32; ++j) {
      const double u = r_out + (r_in - r_out) * (j + 0.5) / 32.0;
      const double x = d_inverse(outer, inner, u);
      err.d_inverse_roundtrip =
          std::max(err.d_inverse_roundtrip, std::abs(d_function(outer, inner, x) - u));
    }
  }

  if (!inner.degenerate()) err.crossing_interior = inner.x_star() > a && inner.x_star() < b;
  return err;
}

ValidationReport cmd_validate(const GaussianSpec& spec, const std::string& name,
                              const ValidateOptions& options) {
  if (options.n == 0) throw DomainError("validate: n must be at least 1");
  const std::size_t d = spec.dim();
  const CouplingContext ctx(spec);
  const CftpOptions cftp = cftp_options(options.schedule, options.backoff);

  std::vector<std::vector<double>> perfect(d);
  std::vector<std::optional<std::vector<double>>> draws(options.n);
  parallel_for(options.n, options.threads, [&](std::uint64_t i) {
    try {
      draws[i] = perfect_sample(ctx, mix_seed(options.seed, i), cftp).sample;
    } catch (const NoCoalescenceError&) {
      draws[i].reset();
    }
  });
  std::uint64_t failures = 0;
  for (const auto& x : draws) {
    if (!x) {
      ++failures;
      continue;
    }
    for (std::size_t k = 0; k < d; ++k) perfect[k].push_back((*x)[k]);
  }

  const RejectionSampler sampler(spec);
  std::vector<std::vector<double>> rejected(d, std::vector<double>(options.n));
  parallel_for(options.n, options.threads, [&](std::uint64_t i) {
    const auto r = sampler.sample(rejection_seed(options.seed, i));
    for (std::size_t k = 0; k < d; ++k) rejected[k][i] = r.sample[k];
  });

  json report;
  report["problem"] = name;
  report["d"] = d;
  report["n"] = options.n;
  report["seed"] = options.seed;
  report["coalescence_failures"] = failures;
  bool pass = failures == 0 && !perfect[0].empty();

  auto ks_entry = [](std::size_t k, const KsResult& r) {
    return json{{"k", k + 1}, {"statistic", r.statistic}, {"threshold", r.threshold}, {"pass", r.passes()}};
  };

  json marginal;
  if (d > kMaxQuadratureDim || perfect[0].empty()) {
    marginal["status"] = "skipped";
    marginal["reason"] = d > kMaxQuadratureDim ? "dimension above the tensor quadrature limit"
                                               : "no perfect samples";
  } else {
    bool ok = true;
    marginal["coordinates"] = json::array();
    for (std::size_t k = 0; k < d; ++k) {
      const MarginalCdf cdf(spec, k);
      const KsResult r = ks_one_sample(perfect[k], [&](double x) { return cdf(x); });
      ok = ok && r.passes();
      marginal["coordinates"].push_back(ks_entry(k, r));
    }
    marginal["status"] = ok ? "pass" : "fail";
    pass = pass && ok;
  }
  report["marginal_ks"] = marginal;

  json two;
  if (perfect[0].empty()) {
    two["status"] = "skipped";
    two["reason"] = "no perfect samples";
  } else {
    bool ok = true;
    two["coordinates"] = json::array();
    for (std::size_t k = 0; k < d; ++k) {
      const KsResult r = ks_two_sample(perfect[k], rejected[k]);
      ok = ok && r.passes();
      two["coordinates"].push_back(ks_entry(k, r));
    }
    two["status"] = ok ? "pass" : "fail";
    pass = pass && ok;
  }
  report["two_sample_ks"] = two;

  // Full-box envelopes, then random nested sub-box pairs.
  EnvelopeOracleErrors worst;
  auto absorb = [&](const Envelope& outer, const Envelope& inner) {
    const auto e = check_envelope(outer, inner);
    worst.min_density = std::max(worst.min_density, e.min_density);
    worst.cdf = std::max(worst.cdf, e.cdf);
    worst.quantile_roundtrip = std::max(worst.quantile_roundtrip, e.quantile_roundtrip);
    worst.d_inverse_roundtrip = std::max(worst.d_inverse_roundtrip, e.d_inverse_roundtrip);
    worst.crossing_interior = worst.crossing_interior && e.crossing_interior;
  };
  for (std::size_t k = 0; k < d; ++k) absorb(ctx.full_envelope(k), ctx.full_envelope(k));
  std::mt19937_64 gen(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < options.envelope_cases; ++c) {
    const auto k = static_cast<std::size_t>(gen() % d);
    BoxState inner_state = full_box_state(d);
    BoxState outer_state = full_box_state(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (i == k || unit(gen) < 0.5) continue;
      const double v = spec.box(i).lo + spec.box(i).width() * unit(gen);
      inner_state[i] = CoordState::point(v);
      if (unit(gen) < 0.5) outer_state[i] = inner_state[i];
    }
    absorb(conditional_envelope(spec, k, outer_state), conditional_envelope(spec, k, inner_state));
  }
  const bool env_ok = worst.min_density <= kEnvelopeOracleTol && worst.cdf <= kEnvelopeOracleTol &&
                      worst.quantile_roundtrip <= kRoundtripTol &&
                      worst.d_inverse_roundtrip <= kRoundtripTol && worst.crossing_interior;
  report["envelope_oracle"] = {
      {"status", env_ok ? "pass" : "fail"},
      {"cases", d + options.envelope_cases},
      {"min_density_max_error", worst.min_density},
      {"cdf_max_error", worst.cdf},
      {"quantile_roundtrip_max_error", worst.quantile_roundtrip},
      {"d_inverse_roundtrip_max_error", worst.d_inverse_roundtrip},
      {"crossing_point_interior", worst.crossing_interior},
      {"oracle_tolerance", kEnvelopeOracleTol},
      {"roundtrip_tolerance", kRoundtripTol},
  };
  pass = pass && env_ok;
  report["pass"] = pass;
  return {report.dump(2) + "\n", pass};
}

}  // namespace boxcftp
