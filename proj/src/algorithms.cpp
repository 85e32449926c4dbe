#include "cvarbandit/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cvarbandit {

namespace {

double clamped_log(double x) { return x > 1.0 ? std::log(x) : 0.0; }

void check_rewards(const SuperArm& super_arm, std::span<const ArmReward> rewards) {
  if (rewards.size() != super_arm.size()) {
    throw std::invalid_argument(fmt::format("expected {} rewards for the super arm, got {}",
                                            super_arm.size(), rewards.size()));
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (!super_arm.contains(rewards[i].arm)) {
      throw std::invalid_argument(
          fmt::format("reward for arm {} which is not in the super arm", rewards[i].arm));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (rewards[j].arm == rewards[i].arm) {
        throw std::invalid_argument(fmt::format("two rewards for arm {}", rewards[i].arm));
      }
    }
  }
}

}  // namespace

SelectionDecision argmax_decision(std::vector<double> index_values) {
  if (index_values.empty()) throw std::invalid_argument("no super arms to select from");
  SelectionDecision d;
  d.chosen = static_cast<std::size_t>(
      std::max_element(index_values.begin(), index_values.end()) - index_values.begin());
  const double best = index_values[d.chosen];
  d.tie = std::count(index_values.begin(), index_values.end(), best) > 1;
  d.index_values = std::move(index_values);
  return d;
}

std::vector<std::size_t> plan_init_phase(const ActionSet& action_set, int num_arms,
                                         int required_pulls) {
  if (required_pulls < 1 || required_pulls > 2) {
    throw std::invalid_argument("required pulls per arm must be 1 or 2");
  }
  std::vector<int> pulls(static_cast<std::size_t>(num_arms), 0);
  for (const SuperArm& a : action_set.super_arms()) {
    for (ArmId i : a.arms()) {
      if (i >= num_arms) throw std::invalid_argument("super arm references unknown arm");
    }
  }
  std::vector<std::size_t> plan;
  while (true) {
    std::size_t best = 0;
    int best_cover = 0;
    for (std::size_t s = 0; s < action_set.size(); ++s) {
      int cover = 0;
      for (ArmId i : action_set[s].arms()) {
        if (pulls[static_cast<std::size_t>(i)] < required_pulls) ++cover;
      }
      if (cover > best_cover) {
        best_cover = cover;
        best = s;
      }
    }
    if (best_cover == 0) break;
    plan.push_back(best);
    for (ArmId i : action_set[best].arms()) ++pulls[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < num_arms; ++i) {
    if (pulls[static_cast<std::size_t>(i)] < required_pulls) {
      throw std::invalid_argument(fmt::format("arm {} is not covered by any super arm", i));
    }
  }
  return plan;
}

// ---- CUCB-G ---------------------------------------------------------------

double cucb_mean_radius(double m_bound, int max_size, double elapsed, std::int64_t count) {
  if (count < 1) throw std::logic_error("unpulled arm");
  return 2.0 * m_bound *
         std::sqrt((max_size + 1) * clamped_log(elapsed) / static_cast<double>(count));
}

double cucb_variance_width(double m_bound, int max_size, double elapsed, std::int64_t count) {
  if (count < 2) throw std::logic_error("variance undefined");
  const double l = clamped_log(elapsed);
  const double dof = static_cast<double>(count - 1);
  const double lp1 = max_size + 1;
  return m_bound * m_bound *
         std::sqrt(2.0 * lp1 * l / dof + 4.0 * lp1 * lp1 * l * l / (dof * dof));
}

GaussianCucbState::GaussianCucbState(int num_arms, VarianceBounds bounds, int max_size,
                                     RiskLevel alpha, RoundConvention rounds)
    : count_(static_cast<std::size_t>(num_arms), 0),
      mean_(static_cast<std::size_t>(num_arms), 0.0),
      sq_dev_(static_cast<std::size_t>(num_arms), 0.0),
      bounds_(bounds),
      max_size_(max_size),
      alpha_(alpha),
      rounds_(rounds) {}

void GaussianCucbState::update(const SuperArm& super_arm, std::span<const ArmReward> rewards) {
  check_rewards(super_arm, rewards);
  for (const ArmReward& r : rewards) {
    const auto i = static_cast<std::size_t>(r.arm);
    // Welford's one-pass update.
    ++count_.at(i);
    const double delta = r.reward - mean_[i];
    mean_[i] += delta / static_cast<double>(count_[i]);
    sq_dev_[i] += delta * (r.reward - mean_[i]);
  }
  ++round_;
}

double GaussianCucbState::sample_variance(ArmId arm) const {
  const auto i = static_cast<std::size_t>(arm);
  if (count_.at(i) < 2) throw std::logic_error("variance undefined");
  return sq_dev_[i] / static_cast<double>(count_[i] - 1);
}

double GaussianCucbState::elapsed() const {
  return static_cast<double>(rounds_ == RoundConvention::kLiteral ? round_ - 1 : round_);
}

double gaussian_mean_ucb(const GaussianCucbState& state, ArmId arm) {
  return state.mean(arm) + cucb_mean_radius(state.bounds().upper, state.max_size(),
                                            state.elapsed(), state.count(arm));
}

double gaussian_variance_lcb(const GaussianCucbState& state, ArmId arm) {
  const double width = cucb_variance_width(state.bounds().upper, state.max_size(),
                                           state.elapsed(), state.count(arm));
  const double floor = state.bounds().lower * state.bounds().lower;
  return std::max(state.sample_variance(arm) - width, floor);
}

SelectionDecision select_cucb_g(const GaussianCucbState& state, const ActionSet& action_set) {
  const double a = state.alpha().value();
  const double tail_factor = std_normal_pdf(std_normal_quantile(a)) / a;
  std::vector<double> mean_ucb(static_cast<std::size_t>(state.num_arms()));
  std::vector<double> var_lcb(mean_ucb.size());
  for (int i = 0; i < state.num_arms(); ++i) {
    mean_ucb[static_cast<std::size_t>(i)] = gaussian_mean_ucb(state, i);
    var_lcb[static_cast<std::size_t>(i)] = gaussian_variance_lcb(state, i);
  }
  std::vector<double> index;
  index.reserve(action_set.size());
  for (const SuperArm& s : action_set.super_arms()) {
    double mu = 0.0;
    double var = 0.0;
    for (ArmId i : s.arms()) {
      mu += mean_ucb[static_cast<std::size_t>(i)];
      var += var_lcb[static_cast<std::size_t>(i)];
    }
    index.push_back(mu - std::sqrt(var) * tail_factor);
  }
  return argmax_decision(std::move(index));
}

// ---- SDCB -----------------------------------------------------------------

DiscreteDistribution SampleMultiset::to_empirical() const {
  if (size_ == 0) throw std::logic_error("no samples");
  std::vector<Atom> atoms;
  atoms.reserve(counts_.size());
  const double n = static_cast<double>(size_);
  for (const auto& [value, count] : counts_) {
    atoms.push_back({value, static_cast<double>(count) / n});
  }
  return DiscreteDistribution(std::move(atoms));
}

double sdcb_radius(double round, std::int64_t count) {
  if (count < 1) throw std::logic_error("unpulled arm");
  return std::sqrt(3.0 * clamped_log(round) / (2.0 * static_cast<double>(count)));
}

SdcbState::SdcbState(int num_arms, RiskLevel alpha)
    : samples_(static_cast<std::size_t>(num_arms)), alpha_(alpha) {}

void SdcbState::update(const SuperArm& super_arm, std::span<const ArmReward> rewards) {
  check_rewards(super_arm, rewards);
  for (const ArmReward& r : rewards) {
    if (!(r.reward >= 0.0 && r.reward <= 1.0)) {
      throw std::invalid_argument(fmt::format("reward {} outside [0, 1]", r.reward));
    }
    samples_.at(static_cast<std::size_t>(r.arm)).insert(r.reward);
  }
  ++round_;
}

DiscreteDistribution sdcb_dominant_cdf(const SdcbState& state, ArmId arm) {
  const SampleMultiset& samples = state.samples(arm);
  const double shift = sdcb_radius(static_cast<double>(state.round()), samples.size());
  return dominant_shift(samples.to_empirical(), shift, 1.0);
}

namespace {

std::vector<DiscreteDistribution> dominant_cdfs(const SdcbState& state) {
  std::vector<DiscreteDistribution> out;
  out.reserve(static_cast<std::size_t>(state.num_arms()));
  for (int i = 0; i < state.num_arms(); ++i) out.push_back(sdcb_dominant_cdf(state, i));
  return out;
}

}  // namespace

SelectionDecision select_sdcb(const SdcbState& state, const ActionSet& action_set,
                              std::size_t support_cap) {
  const std::vector<DiscreteDistribution> arms = dominant_cdfs(state);
  std::vector<double> index;
  index.reserve(action_set.size());
  std::vector<DiscreteDistribution> parts;
  for (const SuperArm& s : action_set.super_arms()) {
    parts.clear();
    for (ArmId i : s.arms()) parts.push_back(arms[static_cast<std::size_t>(i)]);
    index.push_back(cvar_discrete(convolve_many(parts, support_cap), state.alpha()));
  }
  return argmax_decision(std::move(index));
}

double default_epsilon(RiskLevel alpha, int max_size, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  return alpha.value() / ((max_size + 1) * static_cast<double>(horizon));
}

SelectionDecision select_dsdcb(const SdcbState& state, const ActionSet& action_set,
                               double epsilon) {
  std::vector<GridDistribution> arms;
  arms.reserve(static_cast<std::size_t>(state.num_arms()));
  for (int i = 0; i < state.num_arms(); ++i) {
    arms.push_back(discretize_up(sdcb_dominant_cdf(state, i), epsilon));
  }
  std::vector<double> index;
  index.reserve(action_set.size());
  std::vector<GridDistribution> parts;
  for (const SuperArm& s : action_set.super_arms()) {
    parts.clear();
    for (ArmId i : s.arms()) parts.push_back(arms[static_cast<std::size_t>(i)]);
    index.push_back(cvar_discrete(convolve_many(parts).to_distribution(), state.alpha()));
  }
  return argmax_decision(std::move(index));
}

// ---- Naive baseline -------------------------------------------------------

NaiveState::NaiveState(std::size_t num_super_arms, int max_size, RiskLevel alpha)
    : totals_(num_super_arms), max_size_(max_size), alpha_(alpha) {}

void NaiveState::update(std::size_t super_arm_index, std::span<const ArmReward> rewards) {
  double total = 0.0;
  for (const ArmReward& r : rewards) total += r.reward;
  totals_.at(super_arm_index).insert(total);
  ++round_;
}

SelectionDecision select_naive(const NaiveState& state, const ActionSet& action_set) {
  std::vector<double> index;
  index.reserve(action_set.size());
  const double bound = state.max_size();
  for (std::size_t s = 0; s < action_set.size(); ++s) {
    const SampleMultiset& totals = state.totals(s);
    if (totals.size() == 0) {
      throw std::logic_error(fmt::format("super arm {} has never been played", s));
    }
    const double shift = sdcb_radius(static_cast<double>(state.round()), totals.size());
    index.push_back(
        cvar_discrete(dominant_shift(totals.to_empirical(), shift, bound), state.alpha()));
  }
  return argmax_decision(std::move(index));
}

// ---- Policies -------------------------------------------------------------

std::string_view algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kCucbG:
      return "cucb-g";
    case AlgorithmKind::kSdcb:
      return "sdcb";
    case AlgorithmKind::kDSdcb:
      return "d-sdcb";
    case AlgorithmKind::kNaive:
      return "naive";
  }
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view name) {
  for (AlgorithmKind k : kAllAlgorithms) {
    if (algorithm_name(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

class CucbGPolicy final : public Policy {
 public:
  CucbGPolicy(const EnvironmentInstance& env, RiskLevel alpha, RoundConvention rounds)
      : actions_(env.action_set()),
        num_arms_(env.num_arms()),
        state_(env.num_arms(), env.variance_bounds(), env.action_set().max_size(), alpha,
               rounds) {}

  std::string_view name() const override { return "cucb-g"; }
  std::vector<std::size_t> init_plan() const override {
    return plan_init_phase(actions_, num_arms_, 2);
  }
  SelectionDecision select() const override { return select_cucb_g(state_, actions_); }
  void update(std::size_t s, std::span<const ArmReward> rewards) override {
    state_.update(actions_[s], rewards);
  }

 private:
  const ActionSet& actions_;
  int num_arms_;
  GaussianCucbState state_;
};

class SdcbPolicy final : public Policy {
 public:
  SdcbPolicy(const EnvironmentInstance& env, RiskLevel alpha, std::optional<double> epsilon)
      : actions_(env.action_set()),
        num_arms_(env.num_arms()),
        state_(env.num_arms(), alpha),
        epsilon_(epsilon) {}

  std::string_view name() const override { return epsilon_ ? "d-sdcb" : "sdcb"; }
  std::vector<std::size_t> init_plan() const override {
    return plan_init_phase(actions_, num_arms_, 1);
  }
  SelectionDecision select() const override {
    return epsilon_ ? select_dsdcb(state_, actions_, *epsilon_) : select_sdcb(state_, actions_);
  }
  void update(std::size_t s, std::span<const ArmReward> rewards) override {
    state_.update(actions_[s], rewards);
  }

 private:
  const ActionSet& actions_;
  int num_arms_;
  SdcbState state_;
  std::optional<double> epsilon_;
};

class NaivePolicy final : public Policy {
 public:
  NaivePolicy(const EnvironmentInstance& env, RiskLevel alpha)
      : actions_(env.action_set()),
        state_(env.action_set().size(), env.action_set().max_size(), alpha) {}

  std::string_view name() const override { return "naive"; }
  std::vector<std::size_t> init_plan() const override {
    std::vector<std::size_t> plan(actions_.size());
    for (std::size_t s = 0; s < plan.size(); ++s) plan[s] = s;
    return plan;
  }
  SelectionDecision select() const override { return select_naive(state_, actions_); }
  void update(std::size_t s, std::span<const ArmReward> rewards) override {
    state_.update(s, rewards);
  }

 private:
  const ActionSet& actions_;
  NaiveState state_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const AlgorithmSpec& spec, const EnvironmentInstance& env,
                                    RiskLevel alpha, std::int64_t horizon) {
  const bool gaussian = env.kind() == EnvironmentKind::kGaussian;
  switch (spec.kind) {
    case AlgorithmKind::kCucbG:
      if (!gaussian) throw std::invalid_argument("algorithm/environment kind mismatch: cucb-g");
      return std::make_unique<CucbGPolicy>(env, alpha, spec.rounds);
    case AlgorithmKind::kSdcb:
      if (gaussian) throw std::invalid_argument("algorithm/environment kind mismatch: sdcb");
      return std::make_unique<SdcbPolicy>(env, alpha, std::nullopt);
    case AlgorithmKind::kDSdcb: {
      if (gaussian) throw std::invalid_argument("algorithm/environment kind mismatch: d-sdcb");
      const double eps =
          spec.epsilon.value_or(default_epsilon(alpha, env.action_set().max_size(), horizon));
      return std::make_unique<SdcbPolicy>(env, alpha, eps);
    }
    case AlgorithmKind::kNaive:
      if (gaussian) throw std::invalid_argument("algorithm/environment kind mismatch: naive");
      return std::make_unique<NaivePolicy>(env, alpha);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace cvarbandit
