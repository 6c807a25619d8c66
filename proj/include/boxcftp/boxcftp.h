/*
 * C interface to the boxcftp sampler: perfect samples from a multivariate
 * normal truncated to a box, plus the uniform-rejection baseline and the
 * benchmark/validation commands used by the command-line tool.
 *
 * Every fallible call returns a bcftp_status; on failure a message is
 * available from bcftp_last_error() on the calling thread until its next
 * failing call. Problems are immutable after creation and may be shared
 * across threads.
 */
#ifndef BOXCFTP_BOXCFTP_H
#define BOXCFTP_BOXCFTP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BOXCFTP_BUILDING)
#    define BCFTP_API __declspec(dllexport)
#  else
#    define BCFTP_API __declspec(dllimport)
#  endif
#else
#  define BCFTP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bcftp_status {
  BCFTP_OK = 0,
  BCFTP_ERR_DOMAIN = 1,          /* argument outside the mathematical domain */
  BCFTP_ERR_PRECONDITION = 2,    /* inconsistent arguments (e.g. non-nested envelopes) */
  BCFTP_ERR_CONSTRUCTION = 3,    /* matrix not symmetric positive definite, bad box */
  BCFTP_ERR_SCHEMA = 4,          /* malformed problem file or unknown name */
  BCFTP_ERR_NO_COALESCENCE = 5,  /* safety cap reached */
  BCFTP_ERR_UNSUPPORTED = 6,     /* e.g. quadrature above d = 3 */
  BCFTP_ERR_INVARIANT = 7,       /* internal consistency check failed */
  BCFTP_ERR_IO = 8,
  BCFTP_ERR_NULL_ARGUMENT = 9,
  BCFTP_ERR_INTERNAL = 10
} bcftp_status;

typedef enum bcftp_schedule {
  BCFTP_SCHEDULE_PERIODIC = 0, /* site (t - 1) mod d */
  BCFTP_SCHEDULE_RANDOM = 1    /* site drawn from the tape */
} bcftp_schedule;

typedef enum bcftp_backoff {
  BCFTP_BACKOFF_DECREMENT = 0, /* T = -1, -2, -3, ... */
  BCFTP_BACKOFF_DOUBLING = 1   /* T = -1, -2, -4, ... */
} bcftp_backoff;

typedef enum bcftp_acceptance_method {
  BCFTP_ACCEPTANCE_QUADRATURE = 0,
  BCFTP_ACCEPTANCE_MONTE_CARLO = 1
} bcftp_acceptance_method;

typedef struct bcftp_problem bcftp_problem;

BCFTP_API const char* bcftp_last_error(void);
BCFTP_API const char* bcftp_status_name(bcftp_status status);
BCFTP_API const char* bcftp_version(void);

/* Matrices are row-major d x d; lo/hi hold the box bounds. */
BCFTP_API bcftp_status bcftp_problem_from_covariance(size_t d, const double* mu, const double* sigma,
                                                     const double* lo, const double* hi,
                                                     bcftp_problem** out);
BCFTP_API bcftp_status bcftp_problem_from_precision(size_t d, const double* mu, const double* precision,
                                                    const double* lo, const double* hi,
                                                    bcftp_problem** out);
BCFTP_API bcftp_status bcftp_problem_load_json(const char* path, bcftp_problem** out);
BCFTP_API bcftp_status bcftp_problem_parse_json(const char* text, bcftp_problem** out);
/* Names: "table1:X1,X2", "r-box:TYPE:R", "table2-lower:D", "table2-upper:D",
 * "neighbor:D", "corr:EPS:D". */
BCFTP_API bcftp_status bcftp_problem_builtin(const char* name, bcftp_problem** out);
BCFTP_API void bcftp_problem_destroy(bcftp_problem* problem);

BCFTP_API size_t bcftp_problem_dim(const bcftp_problem* problem);
BCFTP_API const char* bcftp_problem_name(const bcftp_problem* problem);
/* Warnings raised while loading (e.g. symmetrization); "" when i is out of range. */
BCFTP_API size_t bcftp_problem_warning_count(const bcftp_problem* problem);
BCFTP_API const char* bcftp_problem_warning(const bcftp_problem* problem, size_t i);
/* JSON problem document (covariance form); out_path "-" is stdout. */
BCFTP_API bcftp_status bcftp_problem_write_json(const bcftp_problem* problem, const char* out_path);

/* R_k(B), k 0-based. */
BCFTP_API bcftp_status bcftp_coupling_coefficient(const bcftp_problem* problem, size_t k, double* out);

typedef struct bcftp_sampler_options {
  bcftp_schedule schedule;
  bcftp_backoff backoff;
  int64_t max_abs_start; /* cap on |T|; 0 selects the default */
} bcftp_sampler_options;

typedef struct bcftp_sample_info {
  int64_t tau;                /* start time of the coalescing pass */
  uint64_t n_uniform_uses;    /* tape reads */
  uint64_t outer_iterations;  /* passes, including T = 0 */
} bcftp_sample_info;

BCFTP_API void bcftp_sampler_options_init(bcftp_sampler_options* options);
/* x_out receives d values. options and info may be NULL. */
BCFTP_API bcftp_status bcftp_perfect_sample(const bcftp_problem* problem, uint64_t seed,
                                            const bcftp_sampler_options* options, double* x_out,
                                            bcftp_sample_info* info);
BCFTP_API bcftp_status bcftp_rejection_sample(const bcftp_problem* problem, uint64_t seed,
                                              double* x_out, uint64_t* uniforms_used);
/* std_error may be NULL; it is 0 for quadrature. */
BCFTP_API bcftp_status bcftp_acceptance_probability(const bcftp_problem* problem,
                                                    bcftp_acceptance_method method, uint64_t n,
                                                    uint64_t seed, double* p_out, double* std_error);
BCFTP_API bcftp_status bcftp_ks_two_sample(const double* a, size_t m, const double* b, size_t n,
                                           double* statistic, double* threshold);
BCFTP_API uint64_t bcftp_mix_seed(uint64_t seed, uint64_t index);

/* Commands. out_path "-" writes to stdout. */
typedef struct bcftp_sample_command {
  uint64_t n;
  uint64_t seed;
  bcftp_schedule schedule;
  bcftp_backoff backoff;
  unsigned threads;
} bcftp_sample_command;

typedef struct bcftp_bench_command {
  uint64_t reps;
  uint64_t seed;
  bcftp_schedule schedule;
  bcftp_backoff backoff;
  const size_t* dims; /* keep only these dimensions; NULL or n_dims 0 keeps all */
  size_t n_dims;
  double rejection_budget;
  uint64_t oracle_mc_points;
  unsigned threads;
  int timing; /* 0 leaves wall_time empty */
} bcftp_bench_command;

typedef struct bcftp_validate_command {
  uint64_t n;
  uint64_t seed;
  bcftp_schedule schedule;
  bcftp_backoff backoff;
  size_t envelope_cases;
  unsigned threads;
} bcftp_validate_command;

BCFTP_API void bcftp_sample_command_init(bcftp_sample_command* cmd);
BCFTP_API void bcftp_bench_command_init(bcftp_bench_command* cmd);
BCFTP_API void bcftp_validate_command_init(bcftp_validate_command* cmd);

/* failures (nullable) receives the number of rows stopped by the cap. */
BCFTP_API bcftp_status bcftp_run_sample(const bcftp_problem* problem, const bcftp_sample_command* cmd,
                                        const char* out_path, uint64_t* failures);
BCFTP_API bcftp_status bcftp_run_rcoef(const bcftp_problem* problem, const char* out_path);
BCFTP_API bcftp_status bcftp_run_bench(const char* selector, const bcftp_bench_command* cmd,
                                       const char* out_path);
/* passed receives 1 when every section passed or was skipped. */
BCFTP_API bcftp_status bcftp_run_validate(const bcftp_problem* problem,
                                          const bcftp_validate_command* cmd, const char* out_path,
                                          int* passed);

#ifdef __cplusplus
}
#endif

#endif /* BOXCFTP_BOXCFTP_H */
