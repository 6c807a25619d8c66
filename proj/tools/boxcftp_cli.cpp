// Command-line front end; talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxcftp/boxcftp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct ProblemDeleter {
  void operator()(bcftp_problem* p) const { bcftp_problem_destroy(p); }
};
using ProblemPtr = std::unique_ptr<bcftp_problem, ProblemDeleter>;

struct ProblemSource {
  std::string file;
  std::string instance;
};

void add_problem_options(CLI::App* cmd, ProblemSource& src) {
  auto* file = cmd->add_option("--problem", src.file, "JSON problem file");
  auto* inst = cmd->add_option("--instance", src.instance,
                               "built-in instance, e.g. table1:0,0 or table2-upper:5");
  file->excludes(inst);
}

int exit_code_for(bcftp_status s) {
  switch (s) {
    case BCFTP_OK: return kExitOk;
    case BCFTP_ERR_DOMAIN:
    case BCFTP_ERR_PRECONDITION:
    case BCFTP_ERR_CONSTRUCTION:
    case BCFTP_ERR_SCHEMA:
    case BCFTP_ERR_UNSUPPORTED:
    case BCFTP_ERR_IO:
    case BCFTP_ERR_NULL_ARGUMENT:
      return kExitUsage;
    default:
      return kExitFailed;
  }
}

int report(bcftp_status s) {
  if (s != BCFTP_OK) std::fprintf(stderr, "boxcftp: %s: %s\n", bcftp_status_name(s), bcftp_last_error());
  return exit_code_for(s);
}

bcftp_status open_problem(const ProblemSource& src, ProblemPtr& out) {
  bcftp_problem* p = nullptr;
  bcftp_status s;
  if (!src.file.empty()) {
    s = bcftp_problem_load_json(src.file.c_str(), &p);
  } else if (!src.instance.empty()) {
    s = bcftp_problem_builtin(src.instance.c_str(), &p);
  } else {
    std::fprintf(stderr, "boxcftp: one of --problem or --instance is required\n");
    return BCFTP_ERR_SCHEMA;
  }
  if (s != BCFTP_OK) return s;
  out.reset(p);
  for (size_t i = 0; i < bcftp_problem_warning_count(p); ++i)
    std::fprintf(stderr, "boxcftp: warning: %s\n", bcftp_problem_warning(p, i));
  return BCFTP_OK;
}

const std::map<std::string, bcftp_schedule> kSchedules{{"periodic", BCFTP_SCHEDULE_PERIODIC},
                                                       {"random", BCFTP_SCHEDULE_RANDOM}};
const std::map<std::string, bcftp_backoff> kBackoffs{{"decrement", BCFTP_BACKOFF_DECREMENT},
                                                     {"doubling", BCFTP_BACKOFF_DOUBLING}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect sampling of box-truncated multivariate normals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bcftp_version());

  ProblemSource src;
  std::string out = "-";
  std::uint64_t n = 1;
  std::uint64_t seed = 0;
  bcftp_schedule schedule = BCFTP_SCHEDULE_PERIODIC;
  bcftp_backoff backoff = BCFTP_BACKOFF_DECREMENT;
  unsigned threads = 1;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--schedule", schedule, "site schedule")
        ->transform(CLI::CheckedTransformer(kSchedules, CLI::ignore_case));
    cmd->add_option("--backoff", backoff, "start-time backoff")
        ->transform(CLI::CheckedTransformer(kBackoffs, CLI::ignore_case));
    cmd->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  };

  auto* sample = app.add_subcommand("sample", "draw perfect samples (CSV)");
  add_problem_options(sample, src);
  sample->add_option("--n", n, "number of samples");
  common(sample);
  sample->add_option("--out", out, "output path, - for stdout");

  auto* rcoef = app.add_subcommand("rcoef", "coupling coefficients R_k(B) (CSV)");
  add_problem_options(rcoef, src);
  rcoef->add_option("--out", out, "output path, - for stdout");

  std::string selector;
  std::uint64_t reps = 1000;
  std::vector<std::size_t> dims;
  double budget = 2e8;
  std::uint64_t mc_points = 1'000'000;
  bool no_timing = false;
  auto* bench = app.add_subcommand("bench", "uniform-usage benchmark for an instance family (CSV)");
  bench->add_option("selector", selector, "table1, fig-r-boxes, table2 or fig-neighbor")->required();
  bench->add_option("--reps", reps, "replications per instance");
  common(bench);
  bench->add_option("--dims", dims, "keep only these dimensions")->delimiter(',');
  bench->add_option("--rejection-budget", budget, "uniforms the rejection runs may use per instance");
  bench->add_option("--oracle-mc-points", mc_points, "Monte Carlo points for the d > 3 acceptance oracle");
  bench->add_flag("--no-timing", no_timing, "leave wall_time empty (byte-reproducible output)");
  bench->add_option("--out", out, "output path, - for stdout");

  std::size_t envelope_cases = 200;
  auto* validate = app.add_subcommand("validate", "distributional and oracle checks (JSON)");
  add_problem_options(validate, src);
  validate->add_option("--n", n, "samples per method");
  common(validate);
  validate->add_option("--envelope-cases", envelope_cases, "random envelopes checked against oracles");
  validate->add_option("--out", out, "output path, - for stdout");

  auto* emit = app.add_subcommand("emit-problem", "write a problem as a JSON problem file");
  add_problem_options(emit, src);
  emit->add_option("--out", out, "output path, - for stdout");

  bool n_given = false;
  try {
    app.parse(argc, argv);
    n_given = validate->count("--n") > 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  ProblemPtr problem;
  if (*bench) {
    bcftp_bench_command cmd;
    bcftp_bench_command_init(&cmd);
    cmd.reps = reps;
    cmd.seed = seed;
    cmd.schedule = schedule;
    cmd.backoff = backoff;
    cmd.dims = dims.data();
    cmd.n_dims = dims.size();
    cmd.rejection_budget = budget;
    cmd.oracle_mc_points = mc_points;
    cmd.threads = threads;
    cmd.timing = no_timing ? 0 : 1;
    return report(bcftp_run_bench(selector.c_str(), &cmd, out.c_str()));
  }

  if (const auto s = open_problem(src, problem); s != BCFTP_OK) return report(s);

  if (*sample) {
    bcftp_sample_command cmd;
    bcftp_sample_command_init(&cmd);
    cmd.n = n;
    cmd.seed = seed;
    cmd.schedule = schedule;
    cmd.backoff = backoff;
    cmd.threads = threads;
    std::uint64_t failures = 0;
    const auto s = bcftp_run_sample(problem.get(), &cmd, out.c_str(), &failures);
    if (s == BCFTP_OK && failures > 0)
      std::fprintf(stderr, "boxcftp: warning: %llu rows hit the coalescence cap\n",
                   static_cast<unsigned long long>(failures));
    return report(s);
  }
  if (*rcoef) return report(bcftp_run_rcoef(problem.get(), out.c_str()));
  if (*emit) return report(bcftp_problem_write_json(problem.get(), out.c_str()));
  if (*validate) {
    bcftp_validate_command cmd;
    bcftp_validate_command_init(&cmd);
    if (n_given) cmd.n = n;
    cmd.seed = seed;
    cmd.schedule = schedule;
    cmd.backoff = backoff;
    cmd.envelope_cases = envelope_cases;
    cmd.threads = threads;
    int passed = 0;
    const auto s = bcftp_run_validate(problem.get(), &cmd, out.c_str(), &passed);
    if (s != BCFTP_OK) return report(s);
    return passed ? kExitOk : kExitFailed;
  }
  return kExitUsage;
}
