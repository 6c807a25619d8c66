#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace boxcftp {

enum class Schedule { random, periodic };

/// Philox4x32-10 block: a keyed bijection of a 128-bit counter.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// splitmix64 finalizer; used to derive independent per-replicate seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

struct TapeEntry {
  double u;         // in [0, 1)
  std::size_t site; // 0-based coordinate
};

/// Time-indexed randomness over t <= 0. Entry t is a pure function of
/// (seed, t), so CFTP restarts see exactly the same values no matter in
/// which order times are visited. Every get() counts as one use.
class RandomnessTape {
 public:
  RandomnessTape(std::uint64_t seed, Schedule schedule, std::size_t dim);

  /// Throws DomainError for t > 0.
  TapeEntry get(std::int64_t t);
  /// Same value as get() without counting a use.
  TapeEntry peek(std::int64_t t);
  /// Count one use of every t in [from, to] without reading the entries.
  void count_uses(std::int64_t from, std::int64_t to);

  std::uint64_t use_count(std::int64_t t) const;
  std::uint64_t total_uses() const { return total_uses_; }
  /// Number of materialized entries (|earliest t| + 1).
  std::size_t materialized() const { return entries_.size(); }

  std::uint64_t seed() const { return seed_; }
  Schedule schedule() const { return schedule_; }
  std::size_t dim() const { return dim_; }

 private:
  const TapeEntry& materialize(std::int64_t t);

  std::uint64_t seed_;
  Schedule schedule_;
  std::size_t dim_;
  std::vector<TapeEntry> entries_;  // index -t
  std::vector<std::uint32_t> uses_;
  std::uint64_t total_uses_ = 0;
};

/// Periodic site (0-based): kappa(t) = ((t - 1) mod d) + 1 in 1-based terms.
std::size_t periodic_site(std::int64_t t, std::size_t dim);

}  // namespace boxcftp
