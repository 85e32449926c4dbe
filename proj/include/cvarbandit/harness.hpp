#pragma once

// Episode simulation, CVaR regret accounting and multi-seed aggregation.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvarbandit/algorithms.hpp"
#include "cvarbandit/environment.hpp"

namespace cvarbandit {

struct RoundRecord {
  std::int64_t t;
  std::size_t chosen;
  double instant_regret;
  double cumulative_regret;

  bool operator==(const RoundRecord&) const = default;
};

struct RegretTrace {
  std::uint64_t run_id = 0;
  std::string algorithm;
  std::uint64_t master_seed = 0;
  std::int64_t horizon = 0;
  std::int64_t thinning = 1;
  // Rounds t with t % thinning == 0.
  std::vector<RoundRecord> records;

  // Exact episode statistics, independent of thinning.
  std::vector<std::int64_t> pulls;  // T_a(T) per super arm
  double final_regret = 0.0;
  double regret_first_half = 0.0;   // rounds (0, T/2]
  double regret_second_half = 0.0;  // rounds (T/2, T]
  std::int64_t suboptimal_first_half = 0;
  std::int64_t suboptimal_second_half = 0;
  std::int64_t final_decile_rounds = 0;  // rounds t > T - T/10
  std::int64_t final_decile_optimal = 0;

  bool operator==(const RegretTrace&) const = default;
};

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpisodeOptions {
  std::uint64_t master_seed = 0;
  std::uint64_t run_id = 0;
  std::int64_t thinning = 1;
};

// Plays the policy's init plan, then selection rounds, for T rounds total.
// Regret is charged from `gaps` for every round including the init phase.
RegretTrace run_episode(const EnvironmentInstance& env, const GapTable& gaps, Policy& policy,
                        std::int64_t horizon, const EpisodeOptions& options);

RegretTrace run_episode(const EnvironmentInstance& env, const AlgorithmSpec& spec,
                        std::int64_t horizon, RiskLevel alpha, std::uint64_t master_seed);

struct ExperimentSpec {
  EnvironmentInstance environment;
  RiskLevel alpha;
  std::int64_t horizon;
  std::vector<AlgorithmSpec> algorithms;
  int seed_count = 20;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::int64_t thinning = 1;
  GroundTruthOptions ground_truth;

  bool operator==(const ExperimentSpec&) const = default;
};

struct AlgorithmAggregate {
  std::string algorithm;
  std::vector<std::int64_t> t;
  std::vector<double> mean;
  std::vector<double> std_dev;  // sample standard deviation, 0 for one run
  double mean_final_regret = 0.0;
  double final_decile_optimal_rate = 0.0;
  int runs = 0;
};

struct ExperimentResult {
  GapTable gaps;
  std::vector<AlgorithmAggregate> aggregates;
  // Ordered by algorithm, then seed.
  std::vector<RegretTrace> traces;
};

// Runs the (algorithms x seeds) grid on up to `workers` threads. Seed index
// s uses RNG run id s for every algorithm, so algorithms face common reward
// streams. A failing run aborts with RunError naming the run.
ExperimentResult run_experiment(const ExperimentSpec& spec);

AlgorithmAggregate aggregate_traces(std::span<const RegretTrace> traces);

// Feeds SDCB and D-SDCB the same history (the SDCB choice is played) and
// compares their per-super-arm indices every selection round.
struct PairedComparison {
  double epsilon = 0.0;
  double bound = 0.0;  // epsilon (L+1) / alpha
  std::vector<double> max_difference;  // per selection round, over super arms
  std::vector<double> min_difference;
  double overall_max = 0.0;
  double overall_min = 0.0;
  std::int64_t rounds_compared = 0;
  std::int64_t choice_disagreements = 0;
};

PairedComparison paired_index_comparison(const EnvironmentInstance& env, std::int64_t horizon,
                                         RiskLevel alpha, std::uint64_t seed,
                                         std::optional<double> epsilon = std::nullopt,
                                         std::uint64_t run_id = 0);

}  // namespace cvarbandit
