#pragma once

// Deliberately naive computations that check the primary implementations
// along independent paths. Speed is not a goal here.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cvarbandit/counter_rng.hpp"
#include "cvarbandit/dist_core.hpp"

namespace cvarbandit::oracle {

struct OracleEstimate {
  double value;
  double standard_error;
  std::int64_t sample_count;
};

using Sampler = std::function<double(SequentialStream&)>;

// Sorts n draws and averages the lowest alpha-fraction, giving the boundary
// order statistic fractional weight. Standard error comes from 10 batch means.
// Requires n >= 1000.
OracleEstimate monte_carlo_cvar(const Sampler& sampler, RiskLevel alpha, std::int64_t n,
                                std::uint64_t seed);

// Lower-tail average of already-sorted draws (fractional boundary weight).
double sorted_tail_mean(std::span<const double> sorted, double alpha);

// (1/alpha) * integral_0^alpha VaR_p dp, walked atom by atom.
double tail_integral_cvar(const DiscreteDistribution& dist, RiskLevel alpha);

// Full nested loop over all pairs, then a sort and merge.
DiscreteDistribution brute_force_convolve(const DiscreteDistribution& d1,
                                          const DiscreteDistribution& d2);

struct Outcome {
  double value;
  double probability;
};

// Every combination of one atom per law, unmerged. Throws
// std::length_error when the product of supports exceeds `max_outcomes`.
std::vector<Outcome> enumerate_outcomes(std::span<const DiscreteDistribution> laws,
                                        std::size_t max_outcomes = 1'000'000);

// CVaR of the sum of independent laws over the full outcome product space.
double enumerate_super_arm_cvar(std::span<const DiscreteDistribution> laws, RiskLevel alpha);

// Largest (grid sum - exact sum) over every combination of one atom per
// law, rounding each atom up to the epsilon grid independently.
double max_round_up_excess(std::span<const DiscreteDistribution> laws, double epsilon);

}  // namespace cvarbandit::oracle
