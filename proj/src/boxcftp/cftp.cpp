#include "boxcftp/cftp.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>

#include "boxcftp/errors.hpp"
#include "boxcftp/normal1d.hpp"

namespace boxcftp {
namespace {

bool others_free(std::span<const CoordState> state, std::size_t k) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i != k && state[i].is_point()) return false;
  }
  return true;
}

// One application of the coupler, in place: `row` holds xi2 on entry (when
// has_previous) and the coupled state on exit.
void couple_row(const CouplingContext& ctx, std::span<const CoordState> xi1,
                std::span<CoordState> row, bool has_previous, double u, std::size_t k,
                std::vector<CoordState>& scratch) {
  const std::size_t d = ctx.dim();
  const CoordState previous_k = has_previous ? row[k] : CoordState::full_range();
  if (has_previous) {
    for (std::size_t i = 0; i < d; ++i) {
      if (i != k && row[i].is_point() && !(xi1[i] == row[i])) {
        std::ostringstream os;
        os << "coupler: coordinate " << i + 1
           << " is pinned in the previous pass but differs in the current one";
        throw InvariantError(os.str());
      }
    }
  }

  if (previous_k.is_point()) {
    std::copy(xi1.begin(), xi1.end(), row.begin());
    row[k] = previous_k;
    return;
  }

  if (has_previous) scratch.assign(row.begin(), row.end());
  std::copy(xi1.begin(), xi1.end(), row.begin());
  row[k] = CoordState::full_range();

  const Envelope inner = ctx.envelope(k, row);
  if (!(u <= inner.r_total())) return;

  if (!has_previous) {
    row[k] = CoordState::point(envelope_quantile(inner, u));
    return;
  }
  const Envelope outer = ctx.envelope(k, scratch);
  if (u <= outer.r_total()) {
    // Only reachable when xi2 did not come from the same tape; the previous
    // level then carries no coupling information for coordinate k.
    row[k] = CoordState::point(envelope_quantile(inner, u));
  } else {
    row[k] = CoordState::point(d_inverse(outer, inner, u));
  }
}

void start_row(const CouplingContext& ctx, RandomnessTape& tape, std::int64_t t,
               std::span<CoordState> row) {
  std::fill(row.begin(), row.end(), CoordState::full_range());
  const TapeEntry e = tape.get(t);
  const Envelope& env = ctx.full_envelope(e.site);
  if (e.u <= env.r_total()) row[e.site] = CoordState::point(envelope_quantile(env, e.u));
}

std::string describe_coefficients(const CouplingContext& ctx) {
  std::ostringstream os;
  os.precision(6);
  os << "R_k(B) = [";
  for (std::size_t k = 0; k < ctx.dim(); ++k) os << (k ? ", " : "") << ctx.full_envelope(k).r_total();
  os << "]";
  return os.str();
}

}  // namespace

std::int64_t default_coalescence_cap() {
  constexpr std::int64_t kDefault = 10'000'000;
  if (const char* env = std::getenv("PT_COALESCE_CAP")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::int64_t>(v);
  }
  return kDefault;
}

CouplingContext::CouplingContext(GaussianSpec spec) : spec_(std::move(spec)) {
  const BoxState free = full_box_state(spec_.dim());
  full_.reserve(spec_.dim());
  for (std::size_t k = 0; k < spec_.dim(); ++k) full_.push_back(conditional_envelope(spec_, k, free));
}

std::vector<double> CouplingContext::coupling_coefficients() const {
  std::vector<double> out;
  out.reserve(full_.size());
  for (const auto& e : full_) out.push_back(e.r_total());
  return out;
}

Envelope CouplingContext::envelope(std::size_t k, std::span<const CoordState> state) const {
  if (others_free(state, k)) return full_[k];
  return conditional_envelope(spec_, k, state);
}

double coupling_coefficient(const GaussianSpec& spec, std::size_t k) {
  if (k >= spec.dim()) throw DomainError("coupling_coefficient: coordinate out of range");
  return conditional_envelope(spec, k, full_box_state(spec.dim())).r_total();
}

BoxState start(const CouplingContext& ctx, RandomnessTape& tape, std::int64_t t) {
  BoxState row(ctx.dim());
  start_row(ctx, tape, t, row);
  return row;
}

BoxState coupler(const CouplingContext& ctx, std::span<const CoordState> xi1,
                 std::span<const CoordState> xi2, double u, std::size_t k) {
  if (xi1.size() != ctx.dim() || xi2.size() != ctx.dim() || k >= ctx.dim())
    throw DomainError("coupler: state size or coordinate does not match the problem");
  BoxState row(xi2.begin(), xi2.end());
  std::vector<CoordState> scratch;
  couple_row(ctx, xi1, row, true, u, k, scratch);
  return row;
}

BoxState coupler_without_previous(const CouplingContext& ctx, std::span<const CoordState> xi1,
                                  double u, std::size_t k) {
  if (xi1.size() != ctx.dim() || k >= ctx.dim())
    throw DomainError("coupler: state size or coordinate does not match the problem");
  BoxState row(ctx.dim());
  std::vector<CoordState> scratch;
  couple_row(ctx, xi1, row, false, u, k, scratch);
  return row;
}

SampleResult perfect_sample(const CouplingContext& ctx, std::uint64_t seed,
                            const CftpOptions& options) {
  const std::size_t d = ctx.dim();
  RandomnessTape tape(seed, options.schedule, d);

  // Trajectory eta[T..0], row i holding time -i, reused across passes.
  std::vector<CoordState> rows(d);
  std::vector<char> present(1, 1);
  auto row = [&](std::size_t i) { return std::span<CoordState>(rows.data() + i * d, d); };
  std::vector<CoordState> scratch;
  std::vector<CoordState> before;
  std::vector<CoordState> snapshot;
  std::vector<char> snapshot_present;

  SampleResult result;
  result.backoff = options.backoff;

  std::int64_t T = 0;
  start_row(ctx, tape, 0, row(0));
  result.outer_iterations = 1;
  bool coalesced = all_points(row(0));
  if (coalesced) result.tau = 0;
  int extra_left = options.extra_passes;

  while (!coalesced || extra_left > 0) {
    if (coalesced) --extra_left;

    const std::int64_t next_T =
        options.backoff == Backoff::decrement ? T - 1 : (T == 0 ? -1 : 2 * T);
    if (-next_T > options.max_abs_start) {
      std::ostringstream os;
      os << "no coalescence within |T| <= " << options.max_abs_start << " (seed " << seed
         << "); " << describe_coefficients(ctx);
      throw NoCoalescenceError(os.str());
    }
    const auto depth = static_cast<std::size_t>(-next_T);

    if (options.check_invariants) {
      snapshot = rows;
      snapshot_present = present;
    }

    rows.resize((depth + 1) * d);
    present.resize(depth + 1, 0);
    start_row(ctx, tape, next_T, row(depth));
    present[depth] = 1;

    for (std::int64_t t = next_T; t < 0; ++t) {
      const auto from = static_cast<std::size_t>(-t);
      const TapeEntry e = tape.get(t + 1);
      const bool had_previous = present[from - 1] != 0;
      if (had_previous && options.stop_on_agreement) before.assign(row(from - 1).begin(), row(from - 1).end());
      couple_row(ctx, row(from), row(from - 1), had_previous, e.u, e.site, scratch);
      present[from - 1] = 1;
      if (had_previous && options.stop_on_agreement && t + 1 < 0 &&
          std::equal(before.begin(), before.end(), row(from - 1).begin())) {
        tape.count_uses(t + 2, 0);
        break;
      }
    }
    T = next_T;
    ++result.outer_iterations;

    if (options.check_invariants) {
      auto& diag = result.diagnostics;
      ++diag.passes_checked;
      for (std::size_t i = 0; i < snapshot_present.size(); ++i) {
        if (!snapshot_present[i]) continue;
        for (std::size_t c = 0; c < d; ++c) {
          const CoordState before = snapshot[i * d + c];
          const CoordState after = rows[i * d + c];
          if (!before.is_point()) continue;
          if (!after.is_point())
            ++diag.monotonicity_violations;
          else if (after.value() != before.value())
            ++diag.persistence_violations;
        }
      }
    }

    if (!coalesced && all_points(row(0))) {
      coalesced = true;
      result.tau = T;
    }
  }

  result.sample.resize(d);
  for (std::size_t c = 0; c < d; ++c) result.sample[c] = rows[c].value();
  result.n_uniform_uses = tape.total_uses();
  return result;
}

SampleResult perfect_sample(const GaussianSpec& spec, std::uint64_t seed,
                            const CftpOptions& options) {
  return perfect_sample(CouplingContext(spec), seed, options);
}

std::vector<double> forward_gibbs(const GaussianSpec& spec, std::span<const double> x0,
                                  std::uint64_t steps, std::uint64_t seed) {
  const std::size_t d = spec.dim();
  if (x0.size() != d) throw DomainError("forward_gibbs: starting point has wrong dimension");
  for (std::size_t k = 0; k < d; ++k) {
    if (!spec.box(k).contains(x0[k])) {
      std::ostringstream os;
      os << "forward_gibbs: starting coordinate " << k + 1 << " = " << x0[k] << " outside the box";
      throw DomainError(os.str());
    }
  }
  std::vector<double> x(x0.begin(), x0.end());
  std::mt19937_64 gen(seed);
  for (std::uint64_t s = 0; s < steps; ++s) {
    const auto k = static_cast<std::size_t>((static_cast<unsigned __int128>(gen()) * d) >> 64);
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const auto cond = conditional_params(spec, k, x);
    x[k] = trunc_quantile({cond.mu_hat, cond.sigma_hat, spec.box(k).lo, spec.box(k).hi}, u);
  }
  return x;
}

}  // namespace boxcftp
