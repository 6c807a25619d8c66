#include "boxcftp/tape.hpp"

#include <sstream>

#include "boxcftp/errors.hpp"

namespace boxcftp {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::size_t periodic_site(std::int64_t t, std::size_t dim) {
  const auto d = static_cast<std::int64_t>(dim);
  const std::int64_t r = ((t - 1) % d + d) % d;
  return static_cast<std::size_t>(r);
}

RandomnessTape::RandomnessTape(std::uint64_t seed, Schedule schedule, std::size_t dim)
    : seed_(seed), schedule_(schedule), dim_(dim) {
  if (dim == 0) throw DomainError("RandomnessTape: dimension must be positive");
}

const TapeEntry& RandomnessTape::materialize(std::int64_t t) {
  if (t > 0) {
    std::ostringstream os;
    os << "RandomnessTape: time index " << t << " is positive";
    throw DomainError(os.str());
  }
  const auto index = static_cast<std::size_t>(-t);
  if (index < entries_.size()) return entries_[index];

  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  uses_.resize(index + 1, 0);
  for (std::size_t i = entries_.size(); i <= index; ++i) {
    const auto ti = static_cast<std::uint64_t>(-static_cast<std::int64_t>(i));
    const auto r = philox4x32(
        {static_cast<std::uint32_t>(ti), static_cast<std::uint32_t>(ti >> 32), 0u, 0u}, key);
    const std::uint64_t bits = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    std::size_t site;
    if (schedule_ == Schedule::periodic) {
      site = periodic_site(-static_cast<std::int64_t>(i), dim_);
    } else {
      const std::uint64_t wide = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
      site = static_cast<std::size_t>(
          (static_cast<unsigned __int128>(wide) * dim_) >> 64);
    }
    entries_.push_back({u, site});
  }
  return entries_[index];
}

TapeEntry RandomnessTape::get(std::int64_t t) {
  const TapeEntry e = materialize(t);
  ++uses_[static_cast<std::size_t>(-t)];
  ++total_uses_;
  return e;
}

TapeEntry RandomnessTape::peek(std::int64_t t) { return materialize(t); }

void RandomnessTape::count_uses(std::int64_t from, std::int64_t to) {
  if (from > to) return;
  materialize(from);
  for (std::int64_t t = from; t <= to; ++t) ++uses_[static_cast<std::size_t>(-t)];
  total_uses_ += static_cast<std::uint64_t>(to - from + 1);
}

std::uint64_t RandomnessTape::use_count(std::int64_t t) const {
  if (t > 0) return 0;
  const auto index = static_cast<std::size_t>(-t);
  return index < uses_.size() ? uses_[index] : 0;
}

}  // namespace boxcftp
