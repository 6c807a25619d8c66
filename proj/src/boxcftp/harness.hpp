#pragma once

// Command implementations behind the CLI and the C API: sample, rcoef,
// bench and validate. Everything writes to a stream; numbers use 17
// significant digits so that CSV output round-trips.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "boxcftp/cftp.hpp"
#include "boxcftp/instances.hpp"

namespace boxcftp {

/// %.17g
std::string format_real(double v);

struct SampleOptions {
  std::uint64_t n = 1;
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::periodic;
  Backoff backoff = Backoff::decrement;
  unsigned threads = 1;
};

/// CSV x1..xd,tau,n_uses,seed_i,status with seed_i = mix_seed(seed, i).
/// Rows whose sampler hit the coalescence cap carry status no_coalescence
/// and empty values. Returns the number of such rows.
std::uint64_t cmd_sample(const GaussianSpec& spec, const SampleOptions& options, std::ostream& out);

/// CSV k,R with k 1-based.
void cmd_rcoef(const GaussianSpec& spec, std::ostream& out);

struct BenchOptions {
  std::uint64_t reps = 1000;
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::periodic;
  Backoff backoff = Backoff::decrement;
  /// Keep only instances of these dimensions (all when empty).
  std::vector<std::size_t> dims;
  /// Uniforms the empirical rejection runs may spend per instance; the
  /// replication count is cut to fit, judged by the oracle M.
  double rejection_budget = 2e8;
  /// Monte Carlo points for the acceptance oracle when d > 3.
  std::uint64_t oracle_mc_points = 1'000'000;
  unsigned threads = 1;
  /// Off: wall_time is left empty so the CSV is byte-deterministic.
  bool timing = true;
};

struct BenchRecord {
  std::string instance;
  std::size_t d = 0;
  std::string method;                  // cftp or rejection
  std::uint64_t replications = 0;      // successful runs
  double mean_uniforms = 0.0;
  double std_error = 0.0;
  std::optional<double> mean_tau;      // cftp only
  std::optional<double> wall_time;     // seconds
  std::optional<double> oracle_uniforms;
  std::string oracle_method;           // quadrature, monte_carlo or empty
  std::uint64_t failures = 0;          // runs stopped by a cap
};

std::vector<BenchRecord> run_bench(const std::vector<NamedInstance>& instances,
                                   const BenchOptions& options);
void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out);
/// Selector lookup, run and CSV in one call.
void cmd_bench(const std::string& selector, const BenchOptions& options, std::ostream& out);

struct ValidateOptions {
  std::uint64_t n = 10'000;
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::periodic;
  Backoff backoff = Backoff::decrement;
  /// Random sub-box envelopes checked against the grid and quadrature oracles.
  std::size_t envelope_cases = 200;
  unsigned threads = 1;
};

struct ValidationReport {
  std::string json;  // pretty-printed report
  bool pass = false;
};

/// Checks: marginal KS against quadrature marginals (d <= 3, otherwise
/// skipped), two-sample KS against rejection samples, envelope oracles.
ValidationReport cmd_validate(const GaussianSpec& spec, const std::string& name,
                              const ValidateOptions& options);

/// Thresholds used by the envelope section of the report.
inline constexpr double kEnvelopeOracleTol = 1e-8;
inline constexpr double kRoundtripTol = 1e-9;

struct EnvelopeOracleErrors {
  double min_density = 0.0;   // one-sided excess over the 500-point mean grid
  double cdf = 0.0;           // against adaptive quadrature of min_density
  double quantile_roundtrip = 0.0;
  double d_inverse_roundtrip = 0.0;
  bool crossing_interior = true;
};

/// Oracle comparison for one envelope; `outer` may equal `inner`. Errors are
/// relative to max(1, |reference|).
EnvelopeOracleErrors check_envelope(const Envelope& outer, const Envelope& inner);

}  // namespace boxcftp
