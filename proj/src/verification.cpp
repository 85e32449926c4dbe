#include "cvarbandit/verification.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "cvarbandit/reference_oracles.hpp"

namespace cvarbandit::verify {

namespace {

constexpr double kAlphas[] = {0.05, 0.25, 0.5, 0.9};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int uniform_int(SequentialStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.bits() % static_cast<std::uint64_t>(hi - lo + 1));
}

DiscreteDistribution fold(const PrimaryOps& ops, std::span<const DiscreteDistribution> laws) {
  DiscreteDistribution acc = laws.front();
  for (std::size_t i = 1; i < laws.size(); ++i) acc = ops.convolve(acc, laws[i]);
  return acc;
}

CheckResult finish(std::string name, bool passed, std::string detail, const Stopwatch& clock) {
  return {std::move(name), passed, std::move(detail), clock.seconds()};
}

}  // namespace

DiscreteDistribution random_distribution(SequentialStream& rng, int max_atoms, double lo,
                                         double hi) {
  const int n = uniform_int(rng, 1, max_atoms);
  const bool coarse = rng.uniform() < 0.25;
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = rng.uniform();
    if (coarse) v = std::round(v * 8.0) / 8.0;
    const double m = rng.uniform();
    atoms.push_back({lo + (hi - lo) * v, m});
    total += m;
  }
  for (Atom& a : atoms) a.mass /= total;
  return DiscreteDistribution(std::move(atoms));
}

DiscreteDistribution random_dominant_law(SequentialStream& rng, int max_atoms) {
  const int n = uniform_int(rng, 1, 3 * max_atoms);
  std::vector<double> samples;
  const int distinct = uniform_int(rng, 1, max_atoms - 1);
  std::vector<double> values;
  for (int i = 0; i < distinct; ++i) values.push_back(rng.uniform());
  for (int i = 0; i < n; ++i) {
    samples.push_back(values[static_cast<std::size_t>(uniform_int(rng, 0, distinct - 1))]);
  }
  const double shift = 0.3 * rng.uniform();
  return dominant_shift(empirical_distribution(samples), shift, 1.0);
}

CheckResult check_gaussian_cvar(const PrimaryOps& ops, std::int64_t mc_samples,
                                std::uint64_t seed) {
  Stopwatch clock;
  const RiskLevel half(0.5);
  const double closed = ops.gaussian(GaussianParams(0.0, 1.0), half);
  const double reference = -2.0 / std::sqrt(2.0 * std::numbers::pi);
  const double err = std::abs(closed - reference);
  const auto mc = oracle::monte_carlo_cvar([](SequentialStream& s) { return s.normal(); }, half,
                                           mc_samples, seed);
  const double z = std::abs(mc.value - closed) / mc.standard_error;
  const bool ok = err <= 1e-6 && z <= 3.0;
  return finish("gaussian-cvar-closed-form", ok,
                fmt::format("|closed - (-2/sqrt(2 pi))| = {:.3e} (limit 1e-6); Monte Carlo "
                            "{:.6f} +- {:.2e} over {} draws, {:.2f} SE (limit 3)",
                            err, mc.value, mc.standard_error, mc_samples, z),
                clock);
}

CheckResult check_discrete_cvar(const PrimaryOps& ops, int instances, std::uint64_t seed) {
  Stopwatch clock;
  SequentialStream rng(seed);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const DiscreteDistribution d = random_distribution(rng, 30);
    for (double a : kAlphas) {
      const RiskLevel alpha(a);
      worst = std::max(worst, std::abs(ops.cvar(d, alpha) - oracle::tail_integral_cvar(d, alpha)));
    }
  }
  return finish("discrete-cvar-vs-tail-integral", worst <= 1e-9,
                fmt::format("{} distributions x {} levels, max |diff| = {:.3e} (limit 1e-9)",
                            instances, std::size(kAlphas), worst),
                clock);
}

CheckResult check_convolution(const PrimaryOps& ops, int pairs, std::uint64_t seed) {
  Stopwatch clock;
  SequentialStream rng(seed);
  double worst_value = 0.0;
  double worst_mass = 0.0;
  int size_mismatches = 0;
  for (int i = 0; i < pairs; ++i) {
    const DiscreteDistribution d1 = random_distribution(rng, 30);
    const DiscreteDistribution d2 = random_distribution(rng, 30);
    const DiscreteDistribution fast = ops.convolve(d1, d2);
    const DiscreteDistribution slow = oracle::brute_force_convolve(d1, d2);
    if (fast.support_size() != slow.support_size()) {
      ++size_mismatches;
      continue;
    }
    for (std::size_t k = 0; k < fast.support_size(); ++k) {
      worst_value = std::max(worst_value, std::abs(fast.atoms()[k].value - slow.atoms()[k].value));
      worst_mass = std::max(worst_mass, std::abs(fast.atoms()[k].mass - slow.atoms()[k].mass));
    }
  }
  const bool ok = size_mismatches == 0 && worst_value <= 1e-12 && worst_mass <= 1e-12;
  return finish("convolution-vs-nested-loop", ok,
                fmt::format("{} pairs, {} support mismatches, max value diff {:.3e}, max mass "
                            "diff {:.3e} (limits 1e-12)",
                            pairs, size_mismatches, worst_value, worst_mass),
                clock);
}

CheckResult check_super_arm_enumeration(const PrimaryOps& ops, int triples, std::uint64_t seed) {
  Stopwatch clock;
  SequentialStream rng(seed);
  double worst = 0.0;
  for (int i = 0; i < triples; ++i) {
    std::vector<DiscreteDistribution> laws;
    for (int k = 0; k < 3; ++k) laws.push_back(random_distribution(rng, 10));
    const RiskLevel alpha(kAlphas[i % std::size(kAlphas)]);
    const double primary = ops.cvar(fold(ops, laws), alpha);
    worst = std::max(worst, std::abs(primary - oracle::enumerate_super_arm_cvar(laws, alpha)));
  }
  return finish("super-arm-cvar-vs-enumeration", worst <= 1e-9,
                fmt::format("{} triples, max |diff| = {:.3e} (limit 1e-9)", triples, worst),
                clock);
}

CheckResult check_discretization_sandwich(const PrimaryOps& ops, int instances,
                                          std::uint64_t seed) {
  Stopwatch clock;
  SequentialStream rng(seed);
  constexpr double kLevels[] = {0.1, 0.3, 0.7};
  constexpr double kEpsilons[] = {1e-2, 1e-3};
  int violations = 0;
  double min_diff = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;  // diff / bound
  for (int i = 0; i < instances; ++i) {
    const int l = uniform_int(rng, 2, 4);
    const RiskLevel alpha(kLevels[uniform_int(rng, 0, 2)]);
    const double eps = kEpsilons[uniform_int(rng, 0, 1)];
    std::vector<DiscreteDistribution> laws;
    std::vector<GridDistribution> grids;
    for (int k = 0; k < l; ++k) {
      laws.push_back(random_dominant_law(rng, 10));
      grids.push_back(ops.discretize(laws.back(), eps));
    }
    const double exact = ops.cvar(fold(ops, laws), alpha);
    const double rounded = ops.cvar(convolve_many(grids).to_distribution(), alpha);
    const double diff = rounded - exact;
    const double bound = eps * (l + 1) / alpha.value();
    if (!(diff >= 0.0 && diff <= bound)) ++violations;
    min_diff = std::min(min_diff, diff);
    worst_ratio = std::max(worst_ratio, diff / bound);
  }
  return finish("discretization-cvar-sandwich", violations == 0,
                fmt::format("{} instances, {} violations, min diff {:.3e}, max diff/bound {:.4f}",
                            instances, violations, min_diff, worst_ratio),
                clock);
}

CheckResult check_round_up_shift(const PrimaryOps& ops, int instances, std::uint64_t seed) {
  Stopwatch clock;
  SequentialStream rng(seed);
  constexpr double kEpsilons[] = {0.1, 1e-2, 3e-3};
  int violations = 0;
  int missing = 0;
  double worst_ratio = 0.0;  // excess / ((L+1) eps)
  for (int i = 0; i < instances; ++i) {
    const int l = uniform_int(rng, 1, 4);
    const double eps = kEpsilons[uniform_int(rng, 0, 2)];
    std::vector<DiscreteDistribution> laws;
    std::vector<GridDistribution> grids;
    for (int k = 0; k < l; ++k) {
      laws.push_back(random_distribution(rng, 4));
      grids.push_back(ops.discretize(laws.back(), eps));
    }
    const GridDistribution sum = convolve_many(grids);
    const double limit = (l + 1) * eps;

    // Walk every combination of one source atom per law.
    std::vector<std::size_t> digit(laws.size(), 0);
    while (true) {
      double exact = 0.0;
      std::int64_t index = 0;
      for (std::size_t k = 0; k < laws.size(); ++k) {
        const double x = laws[k].atoms()[digit[k]].value;
        exact += x;
        // The grid atom a source atom lands on is the first one at or above it.
        const auto atoms = grids[k].atoms();
        const auto it = std::find_if(atoms.begin(), atoms.end(), [&](const GridAtom& g) {
          return static_cast<double>(g.index) * eps >= x;
        });
        if (it == atoms.end()) {
          ++missing;
          break;
        }
        index += it->index;
      }
      const double excess = static_cast<double>(index) * eps - exact;
      const auto found = std::find_if(sum.atoms().begin(), sum.atoms().end(),
                                      [&](const GridAtom& g) { return g.index == index; });
      if (found == sum.atoms().end()) ++missing;
      if (!(excess >= 0.0 && excess < limit)) ++violations;
      worst_ratio = std::max(worst_ratio, excess / limit);

      std::size_t k = 0;
      for (; k < laws.size(); ++k) {
        if (++digit[k] < laws[k].support_size()) break;
        digit[k] = 0;
      }
      if (k == laws.size()) break;
    }
    if (oracle::max_round_up_excess(laws, eps) >= limit) ++violations;
  }
  return finish("round-up-sum-shift", violations == 0 && missing == 0,
                fmt::format("{} instances, {} violations, {} unmatched sums, max excess / "
                            "((L+1) eps) = {:.4f}",
                            instances, violations, missing, worst_ratio),
                clock);
}

CheckResult check_bernoulli_monte_carlo(const PrimaryOps& ops, std::int64_t mc_samples,
                                        std::uint64_t seed) {
  Stopwatch clock;
  const RiskLevel alpha(0.75);
  const double exact = ops.cvar(DiscreteDistribution::bernoulli(0.5), alpha);
  const auto mc = oracle::monte_carlo_cvar(
      [](SequentialStream& s) { return s.uniform() < 0.5 ? 1.0 : 0.0; }, alpha, mc_samples, seed);
  const double z = std::abs(mc.value - exact) / mc.standard_error;
  const bool ok = std::abs(exact - 1.0 / 3.0) <= 1e-12 && z <= 3.0;
  return finish("bernoulli-cvar-monte-carlo", ok,
                fmt::format("exact {:.12f} (expect 1/3), Monte Carlo {:.6f} +- {:.2e}, {:.2f} SE",
                            exact, mc.value, mc.standard_error, z),
                clock);
}

std::vector<CheckResult> run_verification(Scale scale, const PrimaryOps& ops) {
  const std::int64_t mc = scale == Scale::kFull ? 1'000'000 : 100'000;
  std::vector<CheckResult> out;
  out.push_back(check_gaussian_cvar(ops, mc, 11));
  out.push_back(check_discrete_cvar(ops, 200, 12));
  out.push_back(check_convolution(ops, 200, 13));
  out.push_back(check_super_arm_enumeration(ops, 100, 14));
  out.push_back(check_discretization_sandwich(ops, 100, 15));
  out.push_back(check_round_up_shift(ops, 50, 16));
  if (scale == Scale::kFull) out.push_back(check_bernoulli_monte_carlo(ops, mc, 17));
  return out;
}

}  // namespace cvarbandit::verify
