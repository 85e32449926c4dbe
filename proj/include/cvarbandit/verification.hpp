#pragma once

// Agreement checks between the primary distribution arithmetic and the
// reference oracles, plus the epsilon-grid discretization bounds. Each
// check takes the primary operations through `PrimaryOps` so a mutated
// implementation can be plugged in to confirm the checks are sensitive.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cvarbandit/counter_rng.hpp"
#include "cvarbandit/dist_core.hpp"

namespace cvarbandit::verify {

struct PrimaryOps {
  std::function<double(const DiscreteDistribution&, RiskLevel)> cvar = cvar_discrete;
  std::function<DiscreteDistribution(const DiscreteDistribution&, const DiscreteDistribution&)>
      convolve = [](const DiscreteDistribution& a, const DiscreteDistribution& b) {
        return cvarbandit::convolve(a, b);
      };
  std::function<GridDistribution(const DiscreteDistribution&, double)> discretize =
      discretize_up;
  std::function<double(const GaussianParams&, RiskLevel)> gaussian = gaussian_cvar;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  // Worst observed value of the checked quantity against its limit.
  std::string detail;
  double seconds = 0.0;
};

enum class Scale { kQuick, kFull };

// Random distribution with 1..max_atoms atoms. Values are uniform on
// [lo, hi]; with probability 1/4 they are snapped to a coarse grid so
// duplicates and merges get exercised.
DiscreteDistribution random_distribution(SequentialStream& rng, int max_atoms, double lo = 0.0,
                                         double hi = 1.0);

// Empirical law of random samples pushed through a random dominance shift,
// the shape of the per-arm bounds the SDCB algorithms convolve.
DiscreteDistribution random_dominant_law(SequentialStream& rng, int max_atoms);

CheckResult check_gaussian_cvar(const PrimaryOps& ops, std::int64_t mc_samples,
                                std::uint64_t seed);
CheckResult check_discrete_cvar(const PrimaryOps& ops, int instances, std::uint64_t seed);
CheckResult check_convolution(const PrimaryOps& ops, int pairs, std::uint64_t seed);
CheckResult check_super_arm_enumeration(const PrimaryOps& ops, int triples, std::uint64_t seed);
CheckResult check_discretization_sandwich(const PrimaryOps& ops, int instances,
                                          std::uint64_t seed);
CheckResult check_round_up_shift(const PrimaryOps& ops, int instances, std::uint64_t seed);
CheckResult check_bernoulli_monte_carlo(const PrimaryOps& ops, std::int64_t mc_samples,
                                        std::uint64_t seed);

std::vector<CheckResult> run_verification(Scale scale, const PrimaryOps& ops = {});

}  // namespace cvarbandit::verify
