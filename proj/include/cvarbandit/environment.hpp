#pragma once

// Ground-truth combinatorial semi-bandit instances.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cvarbandit/counter_rng.hpp"
#include "cvarbandit/dist_core.hpp"

namespace cvarbandit {

using ArmId = int;

// Sorted set of distinct arm ids.
class SuperArm {
 public:
  // Sorts; throws std::invalid_argument on empty input, negative ids or
  // duplicates.
  explicit SuperArm(std::vector<ArmId> arm_ids);

  std::span<const ArmId> arms() const { return arms_; }
  std::size_t size() const { return arms_.size(); }
  bool contains(ArmId arm) const;

  bool operator==(const SuperArm&) const = default;

 private:
  std::vector<ArmId> arms_;
};

class ActionSet {
 public:
  explicit ActionSet(std::vector<SuperArm> super_arms);

  std::size_t size() const { return super_arms_.size(); }
  bool empty() const { return super_arms_.empty(); }
  const SuperArm& operator[](std::size_t i) const { return super_arms_.at(i); }
  std::span<const SuperArm> super_arms() const { return super_arms_; }
  // L, the largest super-arm size.
  int max_size() const { return max_size_; }
  std::optional<std::size_t> index_of(const SuperArm& arm) const;

  bool operator==(const ActionSet&) const = default;

 private:
  std::vector<SuperArm> super_arms_;
  int max_size_ = 0;
};

// All subsets of {0..num_arms-1} with exactly `size` elements, in
// lexicographic order.
ActionSet all_subsets(int num_arms, int size);

enum class EnvironmentKind { kGaussian, kBounded };

// Known bounds N < sigma_i < M on every Gaussian arm's standard deviation.
struct VarianceBounds {
  double lower;  // N
  double upper;  // M

  bool operator==(const VarianceBounds&) const = default;
};

// Continuous law on [0, 1]; its CVaRs are estimated by Monte Carlo.
struct BetaLaw {
  double a;
  double b;

  bool operator==(const BetaLaw&) const = default;
};

using BoundedArmLaw = std::variant<DiscreteDistribution, BetaLaw>;

class EnvironmentInstance {
 public:
  static EnvironmentInstance gaussian(std::vector<GaussianParams> arms, ActionSet action_set,
                                      VarianceBounds bounds);
  static EnvironmentInstance bounded(std::vector<BoundedArmLaw> arms, ActionSet action_set);

  EnvironmentKind kind() const { return kind_; }
  int num_arms() const;
  const ActionSet& action_set() const { return action_set_; }
  std::span<const GaussianParams> gaussian_arms() const { return gaussian_arms_; }
  std::span<const BoundedArmLaw> bounded_arms() const { return bounded_arms_; }
  const VarianceBounds& variance_bounds() const { return variance_bounds_; }
  // True when every bounded arm has a finite-support law.
  bool exact_ground_truth() const;

  bool operator==(const EnvironmentInstance&) const = default;

 private:
  EnvironmentInstance(EnvironmentKind kind, ActionSet action_set)
      : kind_(kind), action_set_(std::move(action_set)) {}

  EnvironmentKind kind_;
  ActionSet action_set_;
  std::vector<GaussianParams> gaussian_arms_;
  std::vector<BoundedArmLaw> bounded_arms_;
  VarianceBounds variance_bounds_{0.0, 0.0};
};

// Every violated invariant, empty when the instance is well formed.
std::vector<std::string> validate(const EnvironmentInstance& env);

struct ArmReward {
  ArmId arm;
  double reward;
};

// Per-run sampler state: master seed, run id and a pull counter per arm.
class RewardSource {
 public:
  RewardSource(std::uint64_t master_seed, std::uint64_t run_id, int num_arms)
      : streams_(master_seed, run_id), pulls_(static_cast<std::size_t>(num_arms), 0) {}

  CellStream next(ArmId arm) {
    auto& n = pulls_.at(static_cast<std::size_t>(arm));
    return streams_.next_cell(static_cast<std::uint32_t>(arm), n++);
  }
  std::uint64_t pulls(ArmId arm) const { return pulls_.at(static_cast<std::size_t>(arm)); }

 private:
  RewardStreams streams_;
  std::vector<std::uint64_t> pulls_;
};

// One independent draw per constituent arm. Throws std::invalid_argument
// when `arm` is not in the action set.
std::vector<ArmReward> sample_super_arm(const EnvironmentInstance& env, const SuperArm& arm,
                                        RewardSource& source);

double sample_arm(const EnvironmentInstance& env, ArmId arm, CellStream& cell);

struct GroundTruthOptions {
  std::size_t support_cap = kDefaultSupportCap;
  // Only used for environments with continuous bounded laws.
  std::int64_t monte_carlo_samples = 1'000'000;
  std::uint64_t monte_carlo_seed = 0x5eed;

  bool operator==(const GroundTruthOptions&) const = default;
};

struct TrueCvar {
  double value;
  double standard_error;  // zero for exact computations
};

TrueCvar true_cvar_estimate(const EnvironmentInstance& env, const SuperArm& arm,
                            RiskLevel alpha, const GroundTruthOptions& options = {});

double true_cvar(const EnvironmentInstance& env, const SuperArm& arm, RiskLevel alpha,
                 const GroundTruthOptions& options = {});

// Gaps below this are treated as ties for the optimum.
inline constexpr double kGapTieTolerance = 1e-12;

struct GapTable {
  std::vector<double> cvar;
  std::vector<double> cvar_standard_error;
  std::vector<double> gap;
  std::vector<std::size_t> optimal;
  double best_cvar = 0.0;
  std::optional<double> min_gap;  // unset when every super arm is optimal
  double max_gap = 0.0;

  bool is_optimal(std::size_t super_arm) const { return gap.at(super_arm) == 0.0; }
};

GapTable compute_gap_table(const EnvironmentInstance& env, RiskLevel alpha,
                           const GroundTruthOptions& options = {});

}  // namespace cvarbandit
