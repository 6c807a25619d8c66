#include "boxcftp/boxcftp.h"

#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "boxcftp/cftp.hpp"
#include "boxcftp/errors.hpp"
#include "boxcftp/harness.hpp"
#include "boxcftp/instances.hpp"
#include "boxcftp/ks.hpp"
#include "boxcftp/problem_file.hpp"
#include "boxcftp/rejection.hpp"
#include "boxcftp/tape.hpp"

struct bcftp_problem {
  std::string name;
  std::vector<std::string> warnings;
  boxcftp::CouplingContext ctx;
  boxcftp::RejectionSampler rejection;

  bcftp_problem(std::string n, const boxcftp::GaussianSpec& spec, std::vector<std::string> w)
      : name(std::move(n)), warnings(std::move(w)), ctx(spec), rejection(spec) {}

  const boxcftp::GaussianSpec& spec() const { return ctx.spec(); }
};

namespace {

thread_local std::string last_error;

bcftp_status to_status(boxcftp::ErrorKind kind) {
  using boxcftp::ErrorKind;
  switch (kind) {
    case ErrorKind::domain: return BCFTP_ERR_DOMAIN;
    case ErrorKind::precondition: return BCFTP_ERR_PRECONDITION;
    case ErrorKind::construction: return BCFTP_ERR_CONSTRUCTION;
    case ErrorKind::schema: return BCFTP_ERR_SCHEMA;
    case ErrorKind::no_coalescence: return BCFTP_ERR_NO_COALESCENCE;
    case ErrorKind::unsupported: return BCFTP_ERR_UNSUPPORTED;
    case ErrorKind::invariant: return BCFTP_ERR_INVARIANT;
    case ErrorKind::io: return BCFTP_ERR_IO;
  }
  return BCFTP_ERR_INTERNAL;
}

bcftp_status fail(bcftp_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class Fn>
bcftp_status guarded(Fn&& fn) {
  try {
    fn();
    return BCFTP_OK;
  } catch (const boxcftp::Error& e) {
    return fail(to_status(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BCFTP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BCFTP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BCFTP_ERR_INTERNAL, "unknown error");
  }
}

#define BCFTP_REQUIRE(ptr)                                              \
  do {                                                                  \
    if ((ptr) == nullptr) return fail(BCFTP_ERR_NULL_ARGUMENT, #ptr " is NULL"); \
  } while (0)

template <class Fn>
void with_output(const char* path, Fn&& fn) {
  const std::string p = path;
  if (p == "-") {
    fn(std::cout);
    std::cout.flush();
    if (!std::cout) throw boxcftp::IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw boxcftp::IoError("cannot open '" + p + "' for writing");
  fn(out);
  out.close();
  if (!out) throw boxcftp::IoError("failed writing '" + p + "'");
}

boxcftp::Schedule schedule_of(bcftp_schedule s) {
  switch (s) {
    case BCFTP_SCHEDULE_PERIODIC: return boxcftp::Schedule::periodic;
    case BCFTP_SCHEDULE_RANDOM: return boxcftp::Schedule::random;
  }
  throw boxcftp::DomainError("unknown schedule value " + std::to_string(static_cast<int>(s)));
}

boxcftp::Backoff backoff_of(bcftp_backoff b) {
  switch (b) {
    case BCFTP_BACKOFF_DECREMENT: return boxcftp::Backoff::decrement;
    case BCFTP_BACKOFF_DOUBLING: return boxcftp::Backoff::doubling;
  }
  throw boxcftp::DomainError("unknown backoff value " + std::to_string(static_cast<int>(b)));
}

struct RawProblem {
  Eigen::VectorXd mu;
  Eigen::MatrixXd matrix;
  std::vector<boxcftp::Interval> box;
};

RawProblem raw_problem(size_t d, const double* mu, const double* m, const double* lo,
                       const double* hi) {
  if (d == 0) throw boxcftp::ConstructionError("dimension must be at least 1");
  const auto n = static_cast<Eigen::Index>(d);
  RawProblem r{Eigen::VectorXd(n), Eigen::MatrixXd(n, n), {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    r.mu(i) = mu[i];
    for (Eigen::Index j = 0; j < n; ++j) r.matrix(i, j) = m[i * n + j];
    r.box.push_back({lo[i], hi[i]});
  }
  return r;
}

}  // namespace

extern "C" {

const char* bcftp_last_error(void) { return last_error.c_str(); }

const char* bcftp_status_name(bcftp_status status) {
  switch (status) {
    case BCFTP_OK: return "ok";
    case BCFTP_ERR_DOMAIN: return "domain error";
    case BCFTP_ERR_PRECONDITION: return "precondition violated";
    case BCFTP_ERR_CONSTRUCTION: return "invalid problem";
    case BCFTP_ERR_SCHEMA: return "schema error";
    case BCFTP_ERR_NO_COALESCENCE: return "safety cap reached";
    case BCFTP_ERR_UNSUPPORTED: return "unsupported";
    case BCFTP_ERR_INVARIANT: return "invariant violated";
    case BCFTP_ERR_IO: return "i/o error";
    case BCFTP_ERR_NULL_ARGUMENT: return "null argument";
    case BCFTP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bcftp_version(void) { return "1.0.0"; }

bcftp_status bcftp_problem_from_covariance(size_t d, const double* mu, const double* sigma,
                                           const double* lo, const double* hi,
                                           bcftp_problem** out) {
  BCFTP_REQUIRE(mu);
  BCFTP_REQUIRE(sigma);
  BCFTP_REQUIRE(lo);
  BCFTP_REQUIRE(hi);
  BCFTP_REQUIRE(out);
  return guarded([&] {
    auto raw = raw_problem(d, mu, sigma, lo, hi);
    auto spec = boxcftp::GaussianSpec::from_covariance(raw.mu, raw.matrix, raw.box);
    *out = new bcftp_problem("custom", spec, {});
  });
}

bcftp_status bcftp_problem_from_precision(size_t d, const double* mu, const double* precision,
                                          const double* lo, const double* hi,
                                          bcftp_problem** out) {
  BCFTP_REQUIRE(mu);
  BCFTP_REQUIRE(precision);
  BCFTP_REQUIRE(lo);
  BCFTP_REQUIRE(hi);
  BCFTP_REQUIRE(out);
  return guarded([&] {
    auto raw = raw_problem(d, mu, precision, lo, hi);
    auto spec = boxcftp::GaussianSpec::from_precision(raw.mu, raw.matrix, raw.box);
    *out = new bcftp_problem("custom", spec, {});
  });
}

bcftp_status bcftp_problem_load_json(const char* path, bcftp_problem** out) {
  BCFTP_REQUIRE(path);
  BCFTP_REQUIRE(out);
  return guarded([&] {
    auto loaded = boxcftp::load_problem_file(path);
    *out = new bcftp_problem(loaded.name, loaded.spec, loaded.warnings);
  });
}

bcftp_status bcftp_problem_parse_json(const char* text, bcftp_problem** out) {
  BCFTP_REQUIRE(text);
  BCFTP_REQUIRE(out);
  return guarded([&] {
    auto loaded = boxcftp::parse_problem(text);
    *out = new bcftp_problem(loaded.name, loaded.spec, loaded.warnings);
  });
}

bcftp_status bcftp_problem_builtin(const char* name, bcftp_problem** out) {
  BCFTP_REQUIRE(name);
  BCFTP_REQUIRE(out);
  return guarded([&] {
    auto inst = boxcftp::builtin_instance(name);
    *out = new bcftp_problem(inst.id, inst.spec, {});
  });
}

void bcftp_problem_destroy(bcftp_problem* problem) { delete problem; }

size_t bcftp_problem_dim(const bcftp_problem* problem) {
  return problem ? problem->spec().dim() : 0;
}

const char* bcftp_problem_name(const bcftp_problem* problem) {
  return problem ? problem->name.c_str() : "";
}

size_t bcftp_problem_warning_count(const bcftp_problem* problem) {
  return problem ? problem->warnings.size() : 0;
}

const char* bcftp_problem_warning(const bcftp_problem* problem, size_t i) {
  if (!problem || i >= problem->warnings.size()) return "";
  return problem->warnings[i].c_str();
}

bcftp_status bcftp_problem_write_json(const bcftp_problem* problem, const char* out_path) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(out_path);
  return guarded([&] {
    with_output(out_path,
                [&](std::ostream& os) { os << boxcftp::problem_to_json(problem->spec(), problem->name); });
  });
}

bcftp_status bcftp_coupling_coefficient(const bcftp_problem* problem, size_t k, double* out) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(out);
  return guarded([&] {
    if (k >= problem->spec().dim()) throw boxcftp::DomainError("coordinate index out of range");
    *out = problem->ctx.full_envelope(k).r_total();
  });
}

void bcftp_sampler_options_init(bcftp_sampler_options* options) {
  if (!options) return;
  options->schedule = BCFTP_SCHEDULE_PERIODIC;
  options->backoff = BCFTP_BACKOFF_DECREMENT;
  options->max_abs_start = 0;
}

bcftp_status bcftp_perfect_sample(const bcftp_problem* problem, uint64_t seed,
                                  const bcftp_sampler_options* options, double* x_out,
                                  bcftp_sample_info* info) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(x_out);
  return guarded([&] {
    boxcftp::CftpOptions o;
    if (options) {
      o.schedule = schedule_of(options->schedule);
      o.backoff = backoff_of(options->backoff);
      if (options->max_abs_start < 0) throw boxcftp::DomainError("max_abs_start must be >= 0");
      if (options->max_abs_start > 0) o.max_abs_start = options->max_abs_start;
    }
    const auto r = boxcftp::perfect_sample(problem->ctx, seed, o);
    std::copy(r.sample.begin(), r.sample.end(), x_out);
    if (info) {
      info->tau = r.tau;
      info->n_uniform_uses = r.n_uniform_uses;
      info->outer_iterations = r.outer_iterations;
    }
  });
}

bcftp_status bcftp_rejection_sample(const bcftp_problem* problem, uint64_t seed, double* x_out,
                                    uint64_t* uniforms_used) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(x_out);
  return guarded([&] {
    const auto r = problem->rejection.sample(seed);
    std::copy(r.sample.begin(), r.sample.end(), x_out);
    if (uniforms_used) *uniforms_used = r.uniforms_used;
  });
}

bcftp_status bcftp_acceptance_probability(const bcftp_problem* problem,
                                          bcftp_acceptance_method method, uint64_t n,
                                          uint64_t seed, double* p_out, double* std_error) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(p_out);
  return guarded([&] {
    boxcftp::AcceptanceMethod m;
    switch (method) {
      case BCFTP_ACCEPTANCE_QUADRATURE: m = boxcftp::AcceptanceMethod::quadrature; break;
      case BCFTP_ACCEPTANCE_MONTE_CARLO: m = boxcftp::AcceptanceMethod::monte_carlo; break;
      default: throw boxcftp::DomainError("unknown acceptance method");
    }
    const auto est = boxcftp::acceptance_probability(problem->spec(), m, n, seed);
    *p_out = est.p;
    if (std_error) *std_error = est.std_error;
  });
}

bcftp_status bcftp_ks_two_sample(const double* a, size_t m, const double* b, size_t n,
                                 double* statistic, double* threshold) {
  BCFTP_REQUIRE(statistic);
  if (m > 0) BCFTP_REQUIRE(a);
  if (n > 0) BCFTP_REQUIRE(b);
  return guarded([&] {
    const auto r = boxcftp::ks_two_sample({a, m}, {b, n});
    *statistic = r.statistic;
    if (threshold) *threshold = r.threshold;
  });
}

uint64_t bcftp_mix_seed(uint64_t seed, uint64_t index) { return boxcftp::mix_seed(seed, index); }

void bcftp_sample_command_init(bcftp_sample_command* cmd) {
  if (!cmd) return;
  cmd->n = 1;
  cmd->seed = 0;
  cmd->schedule = BCFTP_SCHEDULE_PERIODIC;
  cmd->backoff = BCFTP_BACKOFF_DECREMENT;
  cmd->threads = 1;
}

void bcftp_bench_command_init(bcftp_bench_command* cmd) {
  if (!cmd) return;
  const boxcftp::BenchOptions d;
  cmd->reps = d.reps;
  cmd->seed = d.seed;
  cmd->schedule = BCFTP_SCHEDULE_PERIODIC;
  cmd->backoff = BCFTP_BACKOFF_DECREMENT;
  cmd->dims = nullptr;
  cmd->n_dims = 0;
  cmd->rejection_budget = d.rejection_budget;
  cmd->oracle_mc_points = d.oracle_mc_points;
  cmd->threads = 1;
  cmd->timing = 1;
}

void bcftp_validate_command_init(bcftp_validate_command* cmd) {
  if (!cmd) return;
  const boxcftp::ValidateOptions d;
  cmd->n = d.n;
  cmd->seed = d.seed;
  cmd->schedule = BCFTP_SCHEDULE_PERIODIC;
  cmd->backoff = BCFTP_BACKOFF_DECREMENT;
  cmd->envelope_cases = d.envelope_cases;
  cmd->threads = 1;
}

bcftp_status bcftp_run_sample(const bcftp_problem* problem, const bcftp_sample_command* cmd,
                              const char* out_path, uint64_t* failures) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(cmd);
  BCFTP_REQUIRE(out_path);
  return guarded([&] {
    boxcftp::SampleOptions o;
    o.n = cmd->n;
    o.seed = cmd->seed;
    o.schedule = schedule_of(cmd->schedule);
    o.backoff = backoff_of(cmd->backoff);
    o.threads = cmd->threads;
    std::uint64_t f = 0;
    with_output(out_path, [&](std::ostream& os) { f = boxcftp::cmd_sample(problem->spec(), o, os); });
    if (failures) *failures = f;
  });
}

bcftp_status bcftp_run_rcoef(const bcftp_problem* problem, const char* out_path) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(out_path);
  return guarded([&] {
    with_output(out_path, [&](std::ostream& os) { boxcftp::cmd_rcoef(problem->spec(), os); });
  });
}

bcftp_status bcftp_run_bench(const char* selector, const bcftp_bench_command* cmd,
                             const char* out_path) {
  BCFTP_REQUIRE(selector);
  BCFTP_REQUIRE(cmd);
  BCFTP_REQUIRE(out_path);
  if (cmd->n_dims > 0) BCFTP_REQUIRE(cmd->dims);
  return guarded([&] {
    boxcftp::BenchOptions o;
    o.reps = cmd->reps;
    o.seed = cmd->seed;
    o.schedule = schedule_of(cmd->schedule);
    o.backoff = backoff_of(cmd->backoff);
    o.dims.assign(cmd->dims, cmd->dims + cmd->n_dims);
    o.rejection_budget = cmd->rejection_budget;
    o.oracle_mc_points = cmd->oracle_mc_points;
    o.threads = cmd->threads;
    o.timing = cmd->timing != 0;
    // Resolve the selector before touching the output file.
    const auto instances = boxcftp::bench_instances(selector);
    const auto records = boxcftp::run_bench(instances, o);
    with_output(out_path, [&](std::ostream& os) { boxcftp::write_bench_csv(records, os); });
  });
}

bcftp_status bcftp_run_validate(const bcftp_problem* problem, const bcftp_validate_command* cmd,
                                const char* out_path, int* passed) {
  BCFTP_REQUIRE(problem);
  BCFTP_REQUIRE(cmd);
  BCFTP_REQUIRE(out_path);
  return guarded([&] {
    boxcftp::ValidateOptions o;
    o.n = cmd->n;
    o.seed = cmd->seed;
    o.schedule = schedule_of(cmd->schedule);
    o.backoff = backoff_of(cmd->backoff);
    o.envelope_cases = cmd->envelope_cases;
    o.threads = cmd->threads;
    const auto report = boxcftp::cmd_validate(problem->spec(), problem->name, o);
    with_output(out_path, [&](std::ostream& os) { os << report.json; });
    if (passed) *passed = report.pass ? 1 : 0;
  });
}

}  // extern "C"
