#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "boxcftp/errors.hpp"
#include "boxcftp/tape.hpp"

using namespace boxcftp;

TEST_SUITE("tape") {

TEST_CASE("philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("entries depend only on seed and time, whatever the access order") {
  RandomnessTape forward(42, Schedule::random, 5);
  RandomnessTape backward(42, Schedule::random, 5);
  std::vector<TapeEntry> f;
  for (std::int64_t t = 0; t >= -50; --t) f.push_back(forward.get(t));
  for (std::int64_t t = -50; t <= 0; ++t) {
    const TapeEntry e = backward.peek(t);
    CHECK(e.u == f[static_cast<std::size_t>(-t)].u);
    CHECK(e.site == f[static_cast<std::size_t>(-t)].site);
  }
  RandomnessTape other(43, Schedule::random, 5);
  CHECK(other.peek(-3).u != forward.peek(-3).u);
}

TEST_CASE("uses are counted per read and peek is free") {
  RandomnessTape tape(1, Schedule::periodic, 3);
  tape.get(0);
  tape.get(0);
  tape.get(-2);
  tape.peek(-7);
  CHECK(tape.use_count(0) == 2);
  CHECK(tape.use_count(-2) == 1);
  CHECK(tape.use_count(-7) == 0);
  CHECK(tape.total_uses() == 3);
  tape.count_uses(-4, -1);
  CHECK(tape.total_uses() == 7);
  std::uint64_t sum = 0;
  for (std::int64_t t = 0; t >= -10; --t) sum += tape.use_count(t);
  CHECK(sum == tape.total_uses());
  CHECK_THROWS_AS(tape.get(1), DomainError);
  CHECK_THROWS_AS(RandomnessTape(1, Schedule::periodic, 0), DomainError);
}

TEST_CASE("periodic schedule cycles through the coordinates") {
  // 1-based kappa(t) = ((t - 1) mod d) + 1
  CHECK(periodic_site(0, 3) == 2);
  CHECK(periodic_site(-1, 3) == 1);
  CHECK(periodic_site(-2, 3) == 0);
  CHECK(periodic_site(-3, 3) == 2);
  CHECK(periodic_site(1, 3) == 0);
  RandomnessTape tape(9, Schedule::periodic, 4);
  for (std::int64_t t = 0; t > -20; --t) CHECK(tape.peek(t).site == periodic_site(t, 4));
}

TEST_CASE("random schedule and uniforms look uniform") {
  RandomnessTape tape(77, Schedule::random, 4);
  std::array<int, 4> sites{};
  double mean = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const TapeEntry e = tape.peek(-i);
    CHECK(e.u >= 0.0);
    CHECK(e.u < 1.0);
    ++sites[e.site];
    mean += e.u / n;
  }
  for (int c : sites) CHECK(std::abs(c - n / 4) < 5 * std::sqrt(n * 0.25 * 0.75));
  CHECK(std::abs(mean - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("mix_seed spreads consecutive indices") {
  CHECK(mix_seed(0, 0) != mix_seed(0, 1));
  CHECK(mix_seed(0, 1) != mix_seed(1, 0));
  CHECK(mix_seed(5, 3) == mix_seed(5, 3));
}

}  // TEST_SUITE
