#pragma once

// Counter-based random numbers (Philox4x32-10). A draw is a pure function
// of (key, counter), so reward streams keyed by (seed, run, arm, pull) do
// not depend on how runs are scheduled across threads.

#include <array>
#include <cstdint>

namespace cvarbandit {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);

// Uniform on the open interval (0, 1) from 64 random bits.
double open_unit_interval(std::uint64_t bits);

// Draws for a single (arm, pull) cell. The `lane` counter lets samplers
// that need a variable number of uniforms (rejection methods) keep going.
class CellStream {
 public:
  CellStream(PhiloxKey key, std::uint64_t pull, std::uint32_t arm)
      : key_(key), pull_(pull), arm_(arm) {}

  double uniform();
  double normal();
  double gamma(double shape);
  double beta(double a, double b);

 private:
  void refill();

  PhiloxKey key_;
  std::uint64_t pull_;
  std::uint32_t arm_;
  std::uint32_t lane_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

// Per-run source of semi-bandit reward randomness. Arm i's n-th draw comes
// from the cell (master_seed, run_id, i, n).
class RewardStreams {
 public:
  RewardStreams(std::uint64_t master_seed, std::uint64_t run_id);

  CellStream next_cell(std::uint32_t arm, std::uint64_t pull) const {
    return CellStream(key_, pull, arm);
  }

 private:
  PhiloxKey key_;
};

// Sequential stream for Monte Carlo estimation and test fixtures.
class SequentialStream {
 public:
  explicit SequentialStream(std::uint64_t seed);

  double uniform() { return next_cell().uniform(); }
  double normal() { return next_cell().normal(); }
  double beta(double a, double b) { return next_cell().beta(a, b); }
  std::uint64_t bits();

 private:
  CellStream next_cell() { return CellStream(key_, counter_++, 0xffffffffu); }

  PhiloxKey key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cvarbandit
