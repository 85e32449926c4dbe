#include "cvarbandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cvarbandit/reference_oracles.hpp"

namespace cvarbandit {

SuperArm::SuperArm(std::vector<ArmId> arm_ids) : arms_(std::move(arm_ids)) {
  if (arms_.empty()) throw std::invalid_argument("super arm is empty");
  std::sort(arms_.begin(), arms_.end());
  if (arms_.front() < 0) throw std::invalid_argument("negative arm id in super arm");
  if (std::adjacent_find(arms_.begin(), arms_.end()) != arms_.end()) {
    throw std::invalid_argument("duplicate arm id in super arm");
  }
}

bool SuperArm::contains(ArmId arm) const {
  return std::binary_search(arms_.begin(), arms_.end(), arm);
}

ActionSet::ActionSet(std::vector<SuperArm> super_arms) : super_arms_(std::move(super_arms)) {
  for (const SuperArm& a : super_arms_) {
    max_size_ = std::max(max_size_, static_cast<int>(a.size()));
  }
}

std::optional<std::size_t> ActionSet::index_of(const SuperArm& arm) const {
  const auto it = std::find(super_arms_.begin(), super_arms_.end(), arm);
  if (it == super_arms_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - super_arms_.begin());
}

ActionSet all_subsets(int num_arms, int size) {
  if (size < 1 || size > num_arms) throw std::invalid_argument("invalid subset size");
  std::vector<SuperArm> out;
  std::vector<ArmId> pick(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.emplace_back(pick);
    int i = size - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == num_arms - size + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < size; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return ActionSet(std::move(out));
}

EnvironmentInstance EnvironmentInstance::gaussian(std::vector<GaussianParams> arms,
                                                  ActionSet action_set, VarianceBounds bounds) {
  EnvironmentInstance env(EnvironmentKind::kGaussian, std::move(action_set));
  env.gaussian_arms_ = std::move(arms);
  env.variance_bounds_ = bounds;
  return env;
}

EnvironmentInstance EnvironmentInstance::bounded(std::vector<BoundedArmLaw> arms,
                                                 ActionSet action_set) {
  EnvironmentInstance env(EnvironmentKind::kBounded, std::move(action_set));
  env.bounded_arms_ = std::move(arms);
  return env;
}

int EnvironmentInstance::num_arms() const {
  return static_cast<int>(kind_ == EnvironmentKind::kGaussian ? gaussian_arms_.size()
                                                              : bounded_arms_.size());
}

bool EnvironmentInstance::exact_ground_truth() const {
  return std::all_of(bounded_arms_.begin(), bounded_arms_.end(), [](const BoundedArmLaw& law) {
    return std::holds_alternative<DiscreteDistribution>(law);
  });
}

std::vector<std::string> validate(const EnvironmentInstance& env) {
  std::vector<std::string> violations;
  const int k = env.num_arms();
  if (k == 0) violations.emplace_back("environment has no arms");

  const ActionSet& actions = env.action_set();
  if (actions.empty()) violations.emplace_back("action set is empty");
  std::vector<bool> covered(static_cast<std::size_t>(std::max(k, 0)), false);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    for (ArmId arm : actions[s].arms()) {
      if (arm >= k) {
        violations.push_back(
            fmt::format("super arm {}: arm id {} out of range for {} arms", s, arm, k));
      } else {
        covered[static_cast<std::size_t>(arm)] = true;
      }
    }
    for (std::size_t other = 0; other < s; ++other) {
      if (actions[other] == actions[s]) {
        violations.push_back(fmt::format("super arm {} duplicates super arm {}", s, other));
        break;
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    if (!covered[static_cast<std::size_t>(i)]) {
      violations.push_back(fmt::format("arm {} is not part of any super arm", i));
    }
  }

  if (env.kind() == EnvironmentKind::kGaussian) {
    const auto [n, m] = env.variance_bounds();
    if (!(n > 0.0 && m > 0.0 && n < m)) {
      violations.push_back(fmt::format("variance bounds need 0 < N < M, got N={} M={}", n, m));
    }
    for (int i = 0; i < k; ++i) {
      const double var = std::pow(env.gaussian_arms()[static_cast<std::size_t>(i)].std_dev, 2);
      if (!(n * n < var && var < m * m)) {
        violations.push_back(fmt::format(
            "arm {}: variance bound not strict, need {} < sigma^2 = {} < {}", i, n * n, var,
            m * m));
      }
    }
  } else {
    for (int i = 0; i < k; ++i) {
      const BoundedArmLaw& law = env.bounded_arms()[static_cast<std::size_t>(i)];
      if (const auto* d = std::get_if<DiscreteDistribution>(&law)) {
        if (d->min_value() < 0.0 || d->max_value() > 1.0) {
          violations.push_back(fmt::format("arm {}: support [{}, {}] not within [0, 1]", i,
                                           d->min_value(), d->max_value()));
        }
      } else {
        const auto& beta = std::get<BetaLaw>(law);
        if (!(beta.a > 0.0 && beta.b > 0.0)) {
          violations.push_back(fmt::format("arm {}: beta parameters must be positive", i));
        }
      }
    }
  }
  return violations;
}

namespace {

double sample_discrete(const DiscreteDistribution& law, double u) {
  double cum = 0.0;
  for (const Atom& a : law.atoms()) {
    cum += a.mass;
    if (u <= cum) return a.value;
  }
  return law.max_value();
}

}  // namespace

double sample_arm(const EnvironmentInstance& env, ArmId arm, CellStream& cell) {
  const auto i = static_cast<std::size_t>(arm);
  if (env.kind() == EnvironmentKind::kGaussian) {
    const GaussianParams& p = env.gaussian_arms()[i];
    return p.mean + p.std_dev * cell.normal();
  }
  const BoundedArmLaw& law = env.bounded_arms()[i];
  if (const auto* d = std::get_if<DiscreteDistribution>(&law)) {
    return sample_discrete(*d, cell.uniform());
  }
  const auto& beta = std::get<BetaLaw>(law);
  return cell.beta(beta.a, beta.b);
}

std::vector<ArmReward> sample_super_arm(const EnvironmentInstance& env, const SuperArm& arm,
                                        RewardSource& source) {
  if (!env.action_set().index_of(arm)) {
    throw std::invalid_argument("super arm is not in the action set");
  }
  std::vector<ArmReward> rewards;
  rewards.reserve(arm.size());
  for (ArmId i : arm.arms()) {
    CellStream cell = source.next(i);
    rewards.push_back({i, sample_arm(env, i, cell)});
  }
  return rewards;
}

TrueCvar true_cvar_estimate(const EnvironmentInstance& env, const SuperArm& arm,
                            RiskLevel alpha, const GroundTruthOptions& options) {
  if (env.kind() == EnvironmentKind::kGaussian) {
    double mean = 0.0;
    double var = 0.0;
    for (ArmId i : arm.arms()) {
      const GaussianParams& p = env.gaussian_arms()[static_cast<std::size_t>(i)];
      mean += p.mean;
      var += p.std_dev * p.std_dev;
    }
    return {gaussian_cvar(GaussianParams(mean, std::sqrt(var)), alpha), 0.0};
  }

  const bool exact = std::all_of(arm.arms().begin(), arm.arms().end(), [&](ArmId i) {
    return std::holds_alternative<DiscreteDistribution>(
        env.bounded_arms()[static_cast<std::size_t>(i)]);
  });
  if (exact) {
    std::vector<DiscreteDistribution> laws;
    for (ArmId i : arm.arms()) {
      laws.push_back(std::get<DiscreteDistribution>(env.bounded_arms()[static_cast<std::size_t>(i)]));
    }
    return {cvar_discrete(convolve_many(laws, options.support_cap), alpha), 0.0};
  }

  // Draw each arm from its own cell so the estimate only depends on the seed.
  const oracle::OracleEstimate est = oracle::monte_carlo_cvar(
      [&](SequentialStream& stream) {
        double total = 0.0;
        for (ArmId i : arm.arms()) {
          const BoundedArmLaw& law = env.bounded_arms()[static_cast<std::size_t>(i)];
          if (const auto* d = std::get_if<DiscreteDistribution>(&law)) {
            total += sample_discrete(*d, stream.uniform());
          } else {
            const auto& beta = std::get<BetaLaw>(law);
            total += stream.beta(beta.a, beta.b);
          }
        }
        return total;
      },
      alpha, options.monte_carlo_samples, options.monte_carlo_seed);
  return {est.value, est.standard_error};
}

double true_cvar(const EnvironmentInstance& env, const SuperArm& arm, RiskLevel alpha,
                 const GroundTruthOptions& options) {
  return true_cvar_estimate(env, arm, alpha, options).value;
}

GapTable compute_gap_table(const EnvironmentInstance& env, RiskLevel alpha,
                           const GroundTruthOptions& options) {
  GapTable table;
  const ActionSet& actions = env.action_set();
  for (const SuperArm& a : actions.super_arms()) {
    const TrueCvar c = true_cvar_estimate(env, a, alpha, options);
    table.cvar.push_back(c.value);
    table.cvar_standard_error.push_back(c.standard_error);
  }
  table.best_cvar = *std::max_element(table.cvar.begin(), table.cvar.end());
  for (std::size_t s = 0; s < actions.size(); ++s) {
    double gap = table.best_cvar - table.cvar[s];
    if (gap < kGapTieTolerance) gap = 0.0;
    table.gap.push_back(gap);
    if (gap == 0.0) {
      table.optimal.push_back(s);
    } else if (!table.min_gap || gap < *table.min_gap) {
      table.min_gap = gap;
    }
    table.max_gap = std::max(table.max_gap, gap);
  }
  return table;
}

}  // namespace cvarbandit
