#pragma once

// CVaR-maximizing combinatorial semi-bandit policies: CUCB-G for Gaussian
// arms, SDCB and its epsilon-grid variant for rewards in [0, 1], and a
// baseline that treats every super arm as an independent arm.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cvarbandit/dist_core.hpp"
#include "cvarbandit/environment.hpp"

namespace cvarbandit {

// Which round number feeds the confidence radii. kLiteral uses log(t-1) for
// CUCB-G and log(t) for SDCB; kUnified uses log(t) for both.
enum class RoundConvention { kLiteral, kUnified };

struct SelectionDecision {
  std::size_t chosen = 0;
  std::vector<double> index_values;
  bool tie = false;
};

// First maximal entry wins; `tie` reports whether another entry equals it.
SelectionDecision argmax_decision(std::vector<double> index_values);

// Greedy cover: repeatedly plays the super arm that covers the most arms
// still short of `required_pulls` samples (lowest position on ties).
// Returns positions in the action set.
std::vector<std::size_t> plan_init_phase(const ActionSet& action_set, int num_arms,
                                         int required_pulls);

// ---- CUCB-G ---------------------------------------------------------------

// 2M sqrt((L+1) log(elapsed) / count), log clamped at zero.
double cucb_mean_radius(double m_bound, int max_size, double elapsed, std::int64_t count);
// M^2 sqrt(2(L+1) l / (n-1) + 4(L+1)^2 l^2 / (n-1)^2), l = max(log(elapsed), 0).
double cucb_variance_width(double m_bound, int max_size, double elapsed, std::int64_t count);

class GaussianCucbState {
 public:
  GaussianCucbState(int num_arms, VarianceBounds bounds, int max_size, RiskLevel alpha,
                    RoundConvention rounds = RoundConvention::kLiteral);

  void update(const SuperArm& super_arm, std::span<const ArmReward> rewards);

  int num_arms() const { return static_cast<int>(count_.size()); }
  std::int64_t count(ArmId arm) const { return count_.at(static_cast<std::size_t>(arm)); }
  double mean(ArmId arm) const { return mean_.at(static_cast<std::size_t>(arm)); }
  // n-1 denominator; throws when fewer than two samples exist.
  double sample_variance(ArmId arm) const;
  // Current round t (1 before anything was played).
  std::int64_t round() const { return round_; }
  // The argument whose log scales the radii: t-1 (literal) or t (unified).
  double elapsed() const;

  const VarianceBounds& bounds() const { return bounds_; }
  int max_size() const { return max_size_; }
  RiskLevel alpha() const { return alpha_; }

 private:
  std::vector<std::int64_t> count_;
  std::vector<double> mean_;
  std::vector<double> sq_dev_;
  std::int64_t round_ = 1;
  VarianceBounds bounds_;
  int max_size_;
  RiskLevel alpha_;
  RoundConvention rounds_;
};

// Throws std::logic_error("unpulled arm") when the arm has no samples.
double gaussian_mean_ucb(const GaussianCucbState& state, ArmId arm);
// max(s^2 - D, N^2); throws std::logic_error("variance undefined") below two samples.
double gaussian_variance_lcb(const GaussianCucbState& state, ArmId arm);
SelectionDecision select_cucb_g(const GaussianCucbState& state, const ActionSet& action_set);

// ---- SDCB -----------------------------------------------------------------

// Multiset of observed values kept as value -> multiplicity.
class SampleMultiset {
 public:
  void insert(double value) {
    ++counts_[value];
    ++size_;
  }
  std::int64_t size() const { return size_; }
  std::size_t distinct() const { return counts_.size(); }
  DiscreteDistribution to_empirical() const;

 private:
  std::map<double, std::int64_t> counts_;
  std::int64_t size_ = 0;
};

// sqrt(3 log(t) / (2 count)), log clamped at zero.
double sdcb_radius(double round, std::int64_t count);

class SdcbState {
 public:
  SdcbState(int num_arms, RiskLevel alpha);

  void update(const SuperArm& super_arm, std::span<const ArmReward> rewards);

  int num_arms() const { return static_cast<int>(samples_.size()); }
  std::int64_t count(ArmId arm) const { return samples(arm).size(); }
  const SampleMultiset& samples(ArmId arm) const {
    return samples_.at(static_cast<std::size_t>(arm));
  }
  std::int64_t round() const { return round_; }
  RiskLevel alpha() const { return alpha_; }

 private:
  std::vector<SampleMultiset> samples_;
  std::int64_t round_ = 1;
  RiskLevel alpha_;
};

// Empirical law of the arm shifted by the DKW radius towards 1.
DiscreteDistribution sdcb_dominant_cdf(const SdcbState& state, ArmId arm);

SelectionDecision select_sdcb(const SdcbState& state, const ActionSet& action_set,
                              std::size_t support_cap = kDefaultSupportCap);

// alpha / ((L+1) T).
double default_epsilon(RiskLevel alpha, int max_size, std::int64_t horizon);

SelectionDecision select_dsdcb(const SdcbState& state, const ActionSet& action_set,
                               double epsilon);

// ---- Naive baseline -------------------------------------------------------

class NaiveState {
 public:
  NaiveState(std::size_t num_super_arms, int max_size, RiskLevel alpha);

  void update(std::size_t super_arm_index, std::span<const ArmReward> rewards);

  std::int64_t count(std::size_t super_arm_index) const {
    return totals_.at(super_arm_index).size();
  }
  const SampleMultiset& totals(std::size_t super_arm_index) const {
    return totals_.at(super_arm_index);
  }
  std::int64_t round() const { return round_; }
  int max_size() const { return max_size_; }
  RiskLevel alpha() const { return alpha_; }

 private:
  std::vector<SampleMultiset> totals_;
  std::int64_t round_ = 1;
  int max_size_;
  RiskLevel alpha_;
};

SelectionDecision select_naive(const NaiveState& state, const ActionSet& action_set);

// ---- Uniform policy interface ---------------------------------------------

enum class AlgorithmKind { kCucbG, kSdcb, kDSdcb, kNaive };

std::string_view algorithm_name(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view name);
inline constexpr AlgorithmKind kAllAlgorithms[] = {AlgorithmKind::kCucbG, AlgorithmKind::kSdcb,
                                                   AlgorithmKind::kDSdcb, AlgorithmKind::kNaive};

struct AlgorithmSpec {
  AlgorithmKind kind;
  // d-sdcb only; defaults to alpha / ((L+1) T).
  std::optional<double> epsilon;
  RoundConvention rounds = RoundConvention::kLiteral;

  bool operator==(const AlgorithmSpec&) const = default;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;
  virtual std::vector<std::size_t> init_plan() const = 0;
  virtual SelectionDecision select() const = 0;
  virtual void update(std::size_t super_arm_index, std::span<const ArmReward> rewards) = 0;
};

std::unique_ptr<Policy> make_policy(const AlgorithmSpec& spec, const EnvironmentInstance& env,
                                    RiskLevel alpha, std::int64_t horizon);

}  // namespace cvarbandit
