#include <cmath>
#include <set>

#include "doctest.h"

#include "cvarbandit/counter_rng.hpp"

using namespace cvarbandit;

TEST_CASE("Philox4x32-10 known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("open unit interval never hits the endpoints") {
  CHECK(open_unit_interval(0) > 0.0);
  CHECK(open_unit_interval(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("cells are pure functions of their coordinates") {
  const RewardStreams a(7, 3), b(7, 3), other_run(7, 4), other_seed(8, 3);
  auto c1 = a.next_cell(2, 10);
  auto c2 = b.next_cell(2, 10);
  for (int i = 0; i < 20; ++i) CHECK(c1.uniform() == c2.uniform());
  CHECK(a.next_cell(2, 10).uniform() != other_run.next_cell(2, 10).uniform());
  CHECK(a.next_cell(2, 10).uniform() != other_seed.next_cell(2, 10).uniform());
  CHECK(a.next_cell(2, 10).uniform() != a.next_cell(2, 11).uniform());
  CHECK(a.next_cell(2, 10).uniform() != a.next_cell(3, 10).uniform());
}

TEST_CASE("sampler moments") {
  SequentialStream rng(42);
  const RewardStreams cells(42, 0);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sb = 0, sg = 0;
  for (int i = 0; i < n; ++i) {
    su += rng.uniform();
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sb += rng.beta(2.0, 5.0);
    sg += cells.next_cell(0, static_cast<std::uint64_t>(i)).gamma(0.5);
  }
  const double tol = 5.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(su / n - 0.5) < tol * std::sqrt(1.0 / 12));
  CHECK(std::abs(sn / n) < tol);
  CHECK(std::abs(sn2 / n - 1.0) < tol * std::sqrt(2.0));
  CHECK(std::abs(sb / n - 2.0 / 7.0) < tol * 0.16);
  CHECK(std::abs(sg / n - 0.5) < tol * std::sqrt(0.5));
}

TEST_CASE("sequential bits do not repeat quickly") {
  SequentialStream rng(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(rng.bits());
  CHECK(seen.size() == 10000);
}
