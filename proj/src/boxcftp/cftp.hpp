#pragma once

// Coupling-from-the-past Gibbs sampler for the truncated multivariate
// normal.
//
// A pass started at time T <= 0 tracks every Gibbs chain started in the box
// at once: coordinates are either the full ambient interval or pinned to a
// value shared by all chains. Each update of coordinate k uses one uniform u
// and the envelope of the conditional laws over the current sub-box; u below
// the envelope mass pins the coordinate. Passes are nested: a pass re-reads
// the previous pass's state at t + 1 so that values pinned there are kept
// and fresh pins come from the increment D between the two envelopes. The
// loop stops once every coordinate is pinned at time 0.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "boxcftp/envelope.hpp"
#include "boxcftp/gaussian_model.hpp"
#include "boxcftp/tape.hpp"

namespace boxcftp {

enum class Backoff {
  decrement,  // T <- T - 1, every start time visited
  doubling,   // T <- 2T, starts at -1, -2, -4, ...
};

/// Cap on |T|; PT_COALESCE_CAP overrides the 10^7 default.
std::int64_t default_coalescence_cap();

struct CftpOptions {
  Schedule schedule = Schedule::periodic;
  Backoff backoff = Backoff::decrement;
  std::int64_t max_abs_start = default_coalescence_cap();
  /// Compare every pass against the previous one (monotonicity, persistence).
  bool check_invariants = false;
  /// Passes forced after coalescence; time 0 must not change.
  int extra_passes = 0;
  /// End a pass as soon as it matches the previous pass at some time: from
  /// there on both passes see the same inputs, so the remaining rows are
  /// unchanged. Skipped tape reads are still counted.
  bool stop_on_agreement = true;
};

struct CftpDiagnostics {
  std::uint64_t passes_checked = 0;
  // A pinned coordinate reverted to the full interval in a later pass.
  std::uint64_t monotonicity_violations = 0;
  // A pinned coordinate moved to a different value in a later pass.
  std::uint64_t persistence_violations = 0;
};

struct SampleResult {
  std::vector<double> sample;
  std::int64_t tau = 0;                 // start time of the coalescing pass
  std::uint64_t n_uniform_uses = 0;     // N, total tape reads
  std::uint64_t outer_iterations = 0;   // passes run, including T = 0
  Backoff backoff = Backoff::decrement;
  CftpDiagnostics diagnostics;
};

/// Spec plus the envelopes R_k(.|B) with every other coordinate free, which
/// most updates reuse. Immutable; share freely across threads.
class CouplingContext {
 public:
  explicit CouplingContext(GaussianSpec spec);

  const GaussianSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.dim(); }
  const Envelope& full_envelope(std::size_t k) const { return full_[k]; }
  /// R_k(B) for every k.
  std::vector<double> coupling_coefficients() const;

  /// Envelope for coordinate k over the sub-box `state` (state[k] ignored).
  Envelope envelope(std::size_t k, std::span<const CoordState> state) const;

 private:
  GaussianSpec spec_;
  std::vector<Envelope> full_;
};

/// R_k(B): coupling mass for coordinate k with all others free.
double coupling_coefficient(const GaussianSpec& spec, std::size_t k);

/// Box state at the start of a pass from time T: everything free, except
/// kappa(T) pinned at R^{-1}(U_T | B) when U_T <= R_kappa(T)(B).
BoxState start(const CouplingContext& ctx, RandomnessTape& tape, std::int64_t t);

/// The coupler phi(xi1, xi2, u, k): xi1 is the current pass at time t, xi2
/// the previous pass at t + 1. Every non-k coordinate pinned in xi2 must be
/// pinned to the same value in xi1 (InvariantError otherwise).
BoxState coupler(const CouplingContext& ctx, std::span<const CoordState> xi1,
                 std::span<const CoordState> xi2, double u, std::size_t k);

/// Coupler step for a time with no previous-pass state (gaps left by the
/// doubling backoff): pins via R_k^{-1}(u | xi1) when u <= R_k(xi1).
BoxState coupler_without_previous(const CouplingContext& ctx, std::span<const CoordState> xi1,
                                  double u, std::size_t k);

SampleResult perfect_sample(const CouplingContext& ctx, std::uint64_t seed,
                            const CftpOptions& options = {});
SampleResult perfect_sample(const GaussianSpec& spec, std::uint64_t seed,
                            const CftpOptions& options = {});

/// Plain random-scan Gibbs sampler from x0; a diagnostic baseline.
std::vector<double> forward_gibbs(const GaussianSpec& spec, std::span<const double> x0,
                                  std::uint64_t steps, std::uint64_t seed);

}  // namespace boxcftp
