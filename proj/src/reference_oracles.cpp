#include "cvarbandit/reference_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cvarbandit::oracle {

double sorted_tail_mean(std::span<const double> sorted, double alpha) {
  const double target = alpha * static_cast<double>(sorted.size());
  const auto whole = static_cast<std::size_t>(std::ceil(target));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < whole; ++i) sum += sorted[i];
  sum += (target - static_cast<double>(whole - 1)) * sorted[whole - 1];
  return sum / target;
}

OracleEstimate monte_carlo_cvar(const Sampler& sampler, RiskLevel alpha, std::int64_t n,
                                std::uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("monte_carlo_cvar needs n >= 1000");
  constexpr int kBatches = 10;
  SequentialStream stream(seed);
  std::vector<double> draws(static_cast<std::size_t>(n));
  for (double& d : draws) d = sampler(stream);

  const std::size_t batch = draws.size() / kBatches;
  double batch_sum = 0.0;
  double batch_sq = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    std::vector<double> part(draws.begin() + b * batch, draws.begin() + (b + 1) * batch);
    std::sort(part.begin(), part.end());
    const double est = sorted_tail_mean(part, alpha.value());
    batch_sum += est;
    batch_sq += est * est;
  }
  const double batch_mean = batch_sum / kBatches;
  const double var = std::max(0.0, (batch_sq - kBatches * batch_mean * batch_mean) / (kBatches - 1));

  std::sort(draws.begin(), draws.end());
  return {sorted_tail_mean(draws, alpha.value()), std::sqrt(var / kBatches), n};
}

double tail_integral_cvar(const DiscreteDistribution& dist, RiskLevel alpha) {
  double remaining = alpha.value();
  double integral = 0.0;
  for (const Atom& a : dist.atoms()) {
    const double take = std::min(a.mass, remaining);
    integral += take * a.value;
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  // Rounding can leave a sliver of alpha beyond the last atom.
  if (remaining > 0.0) integral += remaining * dist.max_value();
  return integral / alpha.value();
}

DiscreteDistribution brute_force_convolve(const DiscreteDistribution& d1,
                                          const DiscreteDistribution& d2) {
  std::vector<Atom> pairs;
  for (const Atom& a : d1.atoms()) {
    for (const Atom& b : d2.atoms()) pairs.push_back({a.value + b.value, a.mass * b.mass});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  std::vector<Atom> merged;
  double group_start = 0.0;
  for (const Atom& p : pairs) {
    if (!merged.empty() && p.value - group_start <= kMergeTolerance) {
      merged.back().mass += p.mass;
    } else {
      group_start = p.value;
      merged.push_back(p);
    }
  }
  return DiscreteDistribution(std::move(merged));
}

std::vector<Outcome> enumerate_outcomes(std::span<const DiscreteDistribution> laws,
                                        std::size_t max_outcomes) {
  if (laws.empty()) throw std::invalid_argument("no laws to enumerate");
  std::size_t total = 1;
  for (const auto& law : laws) {
    total *= law.support_size();
    if (total > max_outcomes) {
      throw std::length_error(
          fmt::format("outcome space exceeds {} combinations", max_outcomes));
    }
  }
  std::vector<Outcome> outcomes;
  outcomes.reserve(total);
  std::vector<std::size_t> digit(laws.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    double value = 0.0;
    double prob = 1.0;
    for (std::size_t i = 0; i < laws.size(); ++i) {
      value += laws[i].atoms()[digit[i]].value;
      prob *= laws[i].atoms()[digit[i]].mass;
    }
    outcomes.push_back({value, prob});
    for (std::size_t i = 0; i < laws.size(); ++i) {
      if (++digit[i] < laws[i].support_size()) break;
      digit[i] = 0;
    }
  }
  return outcomes;
}

double enumerate_super_arm_cvar(std::span<const DiscreteDistribution> laws, RiskLevel alpha) {
  std::vector<Outcome> outcomes = enumerate_outcomes(laws);
  std::sort(outcomes.begin(), outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
  const double a = alpha.value();
  double cum = 0.0;
  double var = outcomes.back().value;
  for (const Outcome& o : outcomes) {
    cum += o.probability;
    if (cum >= a) {
      var = o.value;
      break;
    }
  }
  double weighted = 0.0;
  double mass = 0.0;
  for (const Outcome& o : outcomes) {
    if (o.value > var) break;
    weighted += o.value * o.probability;
    mass += o.probability;
  }
  return (weighted - (mass - a) * var) / a;
}

double max_round_up_excess(std::span<const DiscreteDistribution> laws, double epsilon) {
  std::vector<std::size_t> digit(laws.size(), 0);
  double worst = 0.0;
  while (true) {
    double exact = 0.0;
    std::int64_t grid = 0;
    for (std::size_t i = 0; i < laws.size(); ++i) {
      const double x = laws[i].atoms()[digit[i]].value;
      exact += x;
      auto k = static_cast<std::int64_t>(std::ceil(x / epsilon));
      if (static_cast<double>(k) * epsilon < x) ++k;
      grid += k;
    }
    worst = std::max(worst, static_cast<double>(grid) * epsilon - exact);
    std::size_t i = 0;
    for (; i < laws.size(); ++i) {
      if (++digit[i] < laws[i].support_size()) break;
      digit[i] = 0;
    }
    if (i == laws.size()) break;
  }
  return worst;
}

}  // namespace cvarbandit::oracle
