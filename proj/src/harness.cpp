#include "cvarbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

namespace cvarbandit {

RegretTrace run_episode(const EnvironmentInstance& env, const GapTable& gaps, Policy& policy,
                        std::int64_t horizon, const EpisodeOptions& options) {
  if (options.thinning < 1) throw std::invalid_argument("thinning must be at least 1");
  const std::vector<std::size_t> plan = policy.init_plan();
  if (horizon < static_cast<std::int64_t>(plan.size())) {
    throw std::invalid_argument(fmt::format(
        "horizon {} is shorter than the {}-round init phase", horizon, plan.size()));
  }

  RegretTrace trace;
  trace.run_id = options.run_id;
  trace.algorithm = std::string(policy.name());
  trace.master_seed = options.master_seed;
  trace.horizon = horizon;
  trace.thinning = options.thinning;
  trace.pulls.assign(env.action_set().size(), 0);
  trace.records.reserve(static_cast<std::size_t>(horizon / options.thinning));

  const std::int64_t half = horizon / 2;
  const std::int64_t decile_start = horizon - horizon / 10;
  RewardSource source(options.master_seed, options.run_id, env.num_arms());
  double cumulative = 0.0;

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const std::size_t chosen = t <= static_cast<std::int64_t>(plan.size())
                                   ? plan[static_cast<std::size_t>(t - 1)]
                                   : policy.select().chosen;
    const std::vector<ArmReward> rewards =
        sample_super_arm(env, env.action_set()[chosen], source);
    policy.update(chosen, rewards);

    const double gap = gaps.gap.at(chosen);
    cumulative += gap;
    ++trace.pulls[chosen];
    if (t <= half) {
      trace.regret_first_half += gap;
      trace.suboptimal_first_half += gap > 0.0;
    } else {
      trace.regret_second_half += gap;
      trace.suboptimal_second_half += gap > 0.0;
    }
    if (t > decile_start) {
      ++trace.final_decile_rounds;
      trace.final_decile_optimal += gap == 0.0;
    }
    if (t % options.thinning == 0) trace.records.push_back({t, chosen, gap, cumulative});
  }
  trace.final_regret = cumulative;
  return trace;
}

RegretTrace run_episode(const EnvironmentInstance& env, const AlgorithmSpec& spec,
                        std::int64_t horizon, RiskLevel alpha, std::uint64_t master_seed) {
  const GapTable gaps = compute_gap_table(env, alpha);
  const auto policy = make_policy(spec, env, alpha, horizon);
  return run_episode(env, gaps, *policy, horizon, {master_seed, 0, 1});
}

AlgorithmAggregate aggregate_traces(std::span<const RegretTrace> traces) {
  if (traces.empty()) throw std::invalid_argument("nothing to aggregate");
  AlgorithmAggregate agg;
  agg.algorithm = traces.front().algorithm;
  agg.runs = static_cast<int>(traces.size());
  const std::size_t points = traces.front().records.size();
  const double n = static_cast<double>(traces.size());
  agg.t.reserve(points);
  agg.mean.reserve(points);
  agg.std_dev.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    double sum = 0.0;
    for (const RegretTrace& tr : traces) sum += tr.records.at(k).cumulative_regret;
    const double mean = sum / n;
    double sq = 0.0;
    for (const RegretTrace& tr : traces) {
      const double d = tr.records[k].cumulative_regret - mean;
      sq += d * d;
    }
    agg.t.push_back(traces.front().records[k].t);
    agg.mean.push_back(mean);
    agg.std_dev.push_back(traces.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0);
  }
  double final_sum = 0.0;
  double rate_sum = 0.0;
  for (const RegretTrace& tr : traces) {
    final_sum += tr.final_regret;
    if (tr.final_decile_rounds > 0) {
      rate_sum += static_cast<double>(tr.final_decile_optimal) /
                  static_cast<double>(tr.final_decile_rounds);
    }
  }
  agg.mean_final_regret = final_sum / n;
  agg.final_decile_optimal_rate = rate_sum / n;
  return agg;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const auto problems = validate(spec.environment);
  if (!problems.empty()) {
    throw std::invalid_argument("invalid environment: " + problems.front());
  }
  if (spec.seed_count < 1) throw std::invalid_argument("seed count must be at least 1");
  if (spec.algorithms.empty()) throw std::invalid_argument("no algorithms requested");

  ExperimentResult result;
  result.gaps = compute_gap_table(spec.environment, spec.alpha, spec.ground_truth);

  const std::size_t seeds = static_cast<std::size_t>(spec.seed_count);
  const std::size_t jobs = spec.algorithms.size() * seeds;
  result.traces.resize(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const AlgorithmSpec& alg = spec.algorithms[job / seeds];
      const std::uint64_t seed_index = job % seeds;
      try {
        auto policy = make_policy(alg, spec.environment, spec.alpha, spec.horizon);
        result.traces[job] =
            run_episode(spec.environment, result.gaps, *policy, spec.horizon,
                        {spec.master_seed, seed_index, spec.thinning});
      } catch (const std::exception& e) {
        errors[job] = std::make_exception_ptr(
            RunError(fmt::format("run {} ({}, seed index {}): {}", job,
                                 algorithm_name(alg.kind), seed_index, e.what())));
      }
    }
  };

  const int workers = std::clamp(spec.workers, 1, static_cast<int>(jobs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
    result.aggregates.push_back(aggregate_traces(
        std::span<const RegretTrace>(result.traces).subspan(a * seeds, seeds)));
  }
  return result;
}

PairedComparison paired_index_comparison(const EnvironmentInstance& env, std::int64_t horizon,
                                         RiskLevel alpha, std::uint64_t seed,
                                         std::optional<double> epsilon, std::uint64_t run_id) {
  if (env.kind() != EnvironmentKind::kBounded) {
    throw std::invalid_argument("paired comparison needs a bounded environment");
  }
  const ActionSet& actions = env.action_set();
  const int max_size = actions.max_size();
  PairedComparison out;
  out.epsilon = epsilon.value_or(default_epsilon(alpha, max_size, horizon));
  out.bound = out.epsilon * (max_size + 1) / alpha.value();
  out.overall_max = -std::numeric_limits<double>::infinity();
  out.overall_min = std::numeric_limits<double>::infinity();

  SdcbState state(env.num_arms(), alpha);
  RewardSource source(seed, run_id, env.num_arms());
  const std::vector<std::size_t> plan = plan_init_phase(actions, env.num_arms(), 1);
  if (horizon < static_cast<std::int64_t>(plan.size())) {
    throw std::invalid_argument("horizon is shorter than the init phase");
  }

  for (std::int64_t t = 1; t <= horizon; ++t) {
    std::size_t chosen;
    if (t <= static_cast<std::int64_t>(plan.size())) {
      chosen = plan[static_cast<std::size_t>(t - 1)];
    } else {
      const SelectionDecision exact = select_sdcb(state, actions);
      const SelectionDecision grid = select_dsdcb(state, actions, out.epsilon);
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < actions.size(); ++s) {
        const double d = grid.index_values[s] - exact.index_values[s];
        hi = std::max(hi, d);
        lo = std::min(lo, d);
      }
      out.max_difference.push_back(hi);
      out.min_difference.push_back(lo);
      out.overall_max = std::max(out.overall_max, hi);
      out.overall_min = std::min(out.overall_min, lo);
      ++out.rounds_compared;
      out.choice_disagreements += exact.chosen != grid.chosen;
      chosen = exact.chosen;
    }
    state.update(actions[chosen], sample_super_arm(env, actions[chosen], source));
  }
  return out;
}

}  // namespace cvarbandit
