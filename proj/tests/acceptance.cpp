// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Regret thresholds are calibration targets for the
// fixtures below, not theoretical constants.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cvarbandit/commands.hpp"
#include "cvarbandit/harness.hpp"
#include "cvarbandit/verification.hpp"

using namespace cvarbandit;

namespace {

constexpr int kSeeds = 20;
constexpr std::uint64_t kMasterSeed = 2024;

struct Verdict {
  bool passed;
  std::string detail;
};

EnvironmentInstance bernoulli_fixture() {
  std::vector<BoundedArmLaw> arms;
  for (double p : {0.9, 0.8, 0.7, 0.3, 0.2, 0.1}) {
    arms.emplace_back(DiscreteDistribution::bernoulli(p));
  }
  return EnvironmentInstance::bounded(std::move(arms), all_subsets(6, 2));
}

EnvironmentInstance gaussian_fixture() {
  std::vector<GaussianParams> arms;
  for (double mu : {1.0, 0.9, 0.8, 0.5, 0.4}) arms.emplace_back(mu, 0.5);
  return EnvironmentInstance::gaussian(std::move(arms), all_subsets(5, 2), {0.25, 1.0});
}

const char* kBernoulliConfig = R"(environment:
  kind: bounded
  arms: [{bernoulli: 0.9}, {bernoulli: 0.8}, {bernoulli: 0.7},
         {bernoulli: 0.3}, {bernoulli: 0.2}, {bernoulli: 0.1}]
  action_set: [[0, 1], [0, 2], [0, 3], [0, 4], [0, 5], [1, 2], [1, 3], [1, 4],
               [1, 5], [2, 3], [2, 4], [2, 5], [3, 4], [3, 5], [4, 5]]
alpha: 0.3
horizon: 50000
seeds: {count: 20, master_seed: 2024}
algorithms: [{name: sdcb}]
)";

int failures = 0;

void report(int number, const std::string& title, double budget_seconds,
            const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = seconds < budget_seconds;
  const bool passed = v.passed && in_time;
  if (!passed) ++failures;
  std::cout << fmt::format("[{}] criterion {:>2} {}: {}; {:.1f} s (budget {:.0f} s{})\n",
                           passed ? "PASS" : "FAIL", number, title, v.detail, seconds,
                           budget_seconds, in_time ? "" : ", exceeded")
            << std::flush;
}

Verdict from_check(const verify::CheckResult& r) { return {r.passed, r.detail}; }

Verdict both(const verify::CheckResult& a, const verify::CheckResult& b) {
  return {a.passed && b.passed, a.detail + " | " + b.detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  const verify::PrimaryOps ops;

  report(1, "Gaussian CVaR closed form vs Monte Carlo", 5,
         [&] { return from_check(verify::check_gaussian_cvar(ops, 1'000'000, 101)); });

  report(2, "discrete CVaR vs tail oracle", 10,
         [&] { return from_check(verify::check_discrete_cvar(ops, 200, 102)); });

  report(3, "convolution and super-arm enumeration oracles", 30, [&] {
    return both(verify::check_convolution(ops, 200, 103),
                verify::check_super_arm_enumeration(ops, 100, 104));
  });

  report(4, "discretized CVaR sandwich", 60,
         [&] { return from_check(verify::check_discretization_sandwich(ops, 100, 105)); });

  report(5, "round-up sum shift below (L+1) eps", 10,
         [&] { return from_check(verify::check_round_up_shift(ops, 50, 106)); });

  // Criteria 6 and 9 share one experiment: sdcb and naive on common streams.
  const EnvironmentInstance bernoulli = bernoulli_fixture();
  ExperimentSpec spec6{bernoulli, RiskLevel(0.3), 50000,
                       {{AlgorithmKind::kSdcb}, {AlgorithmKind::kNaive}}};
  spec6.seed_count = kSeeds;
  spec6.master_seed = kMasterSeed;
  spec6.workers = 4;
  spec6.thinning = 50000;
  ExperimentResult result6;

  report(6, "SDCB regret flattens and concentrates on the optimum", 600, [&] {
    result6 = run_experiment(spec6);
    double first = 0, second = 0, rate = 0;
    for (int s = 0; s < kSeeds; ++s) {
      const RegretTrace& tr = result6.traces[s];
      first += tr.regret_first_half;
      second += tr.regret_second_half;
      rate += static_cast<double>(tr.final_decile_optimal) / tr.final_decile_rounds;
    }
    first /= kSeeds;
    second /= kSeeds;
    rate /= kSeeds;
    const double ratio = second / first;
    return Verdict{ratio < 0.5 && rate >= 0.8,
                   fmt::format("regret (T/2,T] / (0,T/2] = {:.4f} / {:.4f} = {:.4f} (limit < 0.5), "
                               "final-decile optimal rate {:.4f} (limit >= 0.8)",
                               second, first, ratio, rate)};
  });

  report(7, "CUCB-G suboptimal plays fall in the second half", 600, [&] {
    ExperimentSpec spec{gaussian_fixture(), RiskLevel(0.3), 100000, {{AlgorithmKind::kCucbG}}};
    spec.seed_count = kSeeds;
    spec.master_seed = kMasterSeed;
    spec.workers = 4;
    spec.thinning = 100000;
    const auto result = run_experiment(spec);
    int improving = 0;
    std::string counts;
    for (const RegretTrace& tr : result.traces) {
      improving += tr.suboptimal_second_half < tr.suboptimal_first_half;
      counts += fmt::format(" {}>{}", tr.suboptimal_first_half, tr.suboptimal_second_half);
    }
    return Verdict{improving >= 18, fmt::format("{} of {} seeds improve (limit >= 18);{}",
                                                improving, kSeeds, counts)};
  });

  report(8, "D-SDCB indices track SDCB on shared histories", 900, [&] {
    double lo = INFINITY, hi = -INFINITY, bound = 0;
    std::int64_t rounds = 0, disagreements = 0;
    for (int s = 0; s < kSeeds; ++s) {
      const auto p = paired_index_comparison(bernoulli, 50000, RiskLevel(0.3), kMasterSeed,
                                             std::nullopt, static_cast<std::uint64_t>(s));
      lo = std::min(lo, p.overall_min);
      hi = std::max(hi, p.overall_max);
      bound = p.bound;
      rounds += p.rounds_compared;
      disagreements += p.choice_disagreements;
    }
    const double share = static_cast<double>(disagreements) / static_cast<double>(rounds);
    return Verdict{lo >= 0.0 && hi <= bound && share < 0.01,
                   fmt::format("differences in [{:.3e}, {:.3e}] vs [0, {:.3e}], choices differ in "
                               "{} of {} rounds ({:.4f}%, limit < 1%)",
                               lo, hi, bound, disagreements, rounds, 100 * share)};
  });

  report(9, "SDCB beats the per-super-arm baseline", 60, [&] {
    if (result6.traces.size() != 2 * kSeeds) return Verdict{false, "criterion 6 run missing"};
    double sdcb = 0, naive = 0;
    int wins = 0;
    std::string seeds;
    for (int s = 0; s < kSeeds; ++s) {
      const double a = result6.traces[s].final_regret;
      const double b = result6.traces[kSeeds + s].final_regret;
      sdcb += a / kSeeds;
      naive += b / kSeeds;
      wins += a <= b;
      seeds += fmt::format(" {}:{:.1f}/{:.1f}", s, a, b);
    }
    return Verdict{sdcb <= naive,
                   fmt::format("mean final regret sdcb {:.2f} vs naive {:.2f}, sdcb no worse on "
                               "{} of {} seeds; per seed sdcb/naive:{}",
                               sdcb, naive, wins, kSeeds, seeds)};
  });

  report(10, "trace files identical for 1 and 4 workers", 600, [&] {
    const auto dir = std::filesystem::temp_directory_path() / "cvarbandit_acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto config = dir / "criterion6.yaml";
    std::ofstream(config) << kBernoulliConfig;
    std::ostringstream out, err;
    std::string traces[2];
    for (int w : {1, 4}) {
      RunOverrides o;
      o.output_directory = (dir / fmt::format("workers{}", w)).string();
      o.workers = w;
      o.quiet = true;
      if (cmd_run(config.string(), o, out, err) != 0) {
        return Verdict{false, "run failed: " + err.str()};
      }
      traces[w == 4] = slurp(std::filesystem::path(*o.output_directory) / "trace.csv");
    }
    const bool same = !traces[0].empty() && traces[0] == traces[1];
    return Verdict{same, fmt::format("{} bytes vs {} bytes, {}", traces[0].size(),
                                     traces[1].size(), same ? "identical" : "different")};
  });

  std::cout << fmt::format("{} of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
