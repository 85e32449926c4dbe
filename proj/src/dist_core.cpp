#include "cvarbandit/dist_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include <fmt/format.h>

namespace cvarbandit {

RiskLevel::RiskLevel(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(fmt::format("alpha out of range: {} not in (0, 1)", alpha));
  }
}

GaussianParams::GaussianParams(double mean_, double std_dev_) : mean(mean_), std_dev(std_dev_) {
  if (!std::isfinite(mean_) || !std::isfinite(std_dev_) || !(std_dev_ > 0.0)) {
    throw std::invalid_argument(
        fmt::format("invalid Gaussian parameters: mean {}, std_dev {}", mean_, std_dev_));
  }
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value) || !std::isfinite(a.mass)) {
      throw std::invalid_argument("distribution atoms must be finite");
    }
    if (a.mass < 0.0) {
      throw std::invalid_argument(fmt::format("negative mass {} at {}", a.mass, a.value));
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  atoms_.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().value == a.value) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }
  if (atoms_.empty()) throw std::invalid_argument("distribution has no atoms");
  const double total = total_mass();
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument(fmt::format("masses sum to {}, expected 1", total));
  }
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
  return DiscreteDistribution({{value, 1.0}});
}

DiscreteDistribution DiscreteDistribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(fmt::format("Bernoulli parameter {} not in [0, 1]", p));
  }
  return DiscreteDistribution({{0.0, 1.0 - p}, {1.0, p}});
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.value * a.mass;
  return m;
}

double DiscreteDistribution::total_mass() const {
  double total = 0.0;
  for (const Atom& a : atoms_) total += a.mass;
  return total;
}

double DiscreteDistribution::cdf(double x) const {
  double cum = 0.0;
  for (const Atom& a : atoms_) {
    if (a.value > x) break;
    cum += a.mass;
  }
  return cum;
}

DiscreteDistribution DiscreteDistribution::shifted(double offset) const {
  std::vector<Atom> out(atoms_);
  for (Atom& a : out) a.value += offset;
  return DiscreteDistribution(std::move(out));
}

DiscreteDistribution DiscreteDistribution::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  std::vector<Atom> out(atoms_);
  for (Atom& a : out) a.value *= factor;
  return DiscreteDistribution(std::move(out));
}

GridDistribution::GridDistribution(double step, std::vector<GridAtom> atoms) : step_(step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("grid step must be positive");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const GridAtom& a, const GridAtom& b) { return a.index < b.index; });
  atoms_.reserve(atoms.size());
  double total = 0.0;
  for (const GridAtom& a : atoms) {
    if (!(a.mass >= 0.0)) throw std::invalid_argument("grid masses must be non-negative");
    total += a.mass;
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().index == a.index) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }
  if (atoms_.empty()) throw std::invalid_argument("distribution has no atoms");
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument(fmt::format("masses sum to {}, expected 1", total));
  }
}

DiscreteDistribution GridDistribution::to_distribution() const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) out.push_back({value_at(i), atoms_[i].mass});
  return DiscreteDistribution(DiscreteDistribution::Canonical{}, std::move(out));
}

DiscreteDistribution empirical_distribution(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < sorted.size();) {
    if (!std::isfinite(sorted[i])) throw std::invalid_argument("samples must be finite");
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    atoms.push_back({sorted[i], static_cast<double>(j - i) / n});
    i = j;
  }
  return DiscreteDistribution(std::move(atoms));
}

namespace {

// Index of the VaR atom. Falls back to the last atom when rounding leaves
// the cumulative mass a hair below alpha.
std::size_t var_index(std::span<const Atom> atoms, double alpha) {
  double cum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    cum += atoms[i].mass;
    if (cum >= alpha) return i;
  }
  return atoms.size() - 1;
}

}  // namespace

double var_discrete(const DiscreteDistribution& dist, RiskLevel alpha) {
  return dist.atoms()[var_index(dist.atoms(), alpha.value())].value;
}

double cvar_discrete(const DiscreteDistribution& dist, RiskLevel alpha) {
  const auto atoms = dist.atoms();
  const double a = alpha.value();
  const std::size_t k = var_index(atoms, a);
  double weighted = 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    weighted += atoms[i].value * atoms[i].mass;
    cum += atoms[i].mass;
  }
  const double var = atoms[k].value;
  return (weighted - (cum - a) * var) / a;
}

namespace {

// Streams pairwise sums of two sorted supports in increasing order. Each
// row i of the sum table (x_i + y_j, j = 0..) is already sorted, so a heap
// over row heads yields a k-way merge without materializing all pairs.
template <typename Value, typename RowA, typename RowB, typename Emit>
void merge_pairwise_sums(std::size_t n1, std::size_t n2, RowA value1, RowB value2,
                         Emit emit) {
  struct Head {
    Value sum;
    std::size_t i;
    std::size_t j;
  };
  auto greater = [](const Head& a, const Head& b) {
    if (a.sum != b.sum) return a.sum > b.sum;
    if (a.i != b.i) return a.i > b.i;
    return a.j > b.j;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(greater)> heap(greater);
  for (std::size_t i = 0; i < n1; ++i) heap.push({value1(i) + value2(0), i, 0});
  while (!heap.empty()) {
    const Head h = heap.top();
    heap.pop();
    emit(h.sum, h.i, h.j);
    if (h.j + 1 < n2) heap.push({value1(h.i) + value2(h.j + 1), h.i, h.j + 1});
  }
}

[[noreturn]] void throw_explosion(std::size_t cap) {
  throw SupportExplosion(fmt::format(
      "support explosion: convolution exceeds {} atoms; use the discretized variant", cap));
}

}  // namespace

DiscreteDistribution convolve(const DiscreteDistribution& d1, const DiscreteDistribution& d2,
                              std::size_t support_cap) {
  const auto a1 = d1.atoms();
  const auto a2 = d2.atoms();
  std::vector<Atom> out;
  out.reserve(std::min(a1.size() * a2.size(), support_cap));
  double group_start = 0.0;
  merge_pairwise_sums<double>(
      a1.size(), a2.size(), [&](std::size_t i) { return a1[i].value; },
      [&](std::size_t j) { return a2[j].value; },
      [&](double sum, std::size_t i, std::size_t j) {
        const double mass = a1[i].mass * a2[j].mass;
        if (!out.empty() && sum - group_start <= kMergeTolerance) {
          out.back().mass += mass;
          return;
        }
        if (out.size() == support_cap) throw_explosion(support_cap);
        group_start = sum;
        out.push_back({sum, mass});
      });
  return DiscreteDistribution(DiscreteDistribution::Canonical{}, std::move(out));
}

DiscreteDistribution convolve_many(std::span<const DiscreteDistribution> dists,
                                   std::size_t support_cap) {
  if (dists.empty()) throw std::invalid_argument("convolve_many needs at least one distribution");
  DiscreteDistribution acc = dists.front();
  for (std::size_t i = 1; i < dists.size(); ++i) acc = convolve(acc, dists[i], support_cap);
  return acc;
}

GridDistribution convolve(const GridDistribution& g1, const GridDistribution& g2,
                          std::size_t support_cap) {
  if (g1.step() != g2.step()) throw std::invalid_argument("grid steps differ");
  const auto a1 = g1.atoms();
  const auto a2 = g2.atoms();
  std::vector<GridAtom> out;
  out.reserve(std::min(a1.size() * a2.size(), support_cap));
  merge_pairwise_sums<std::int64_t>(
      a1.size(), a2.size(), [&](std::size_t i) { return a1[i].index; },
      [&](std::size_t j) { return a2[j].index; },
      [&](std::int64_t sum, std::size_t i, std::size_t j) {
        const double mass = a1[i].mass * a2[j].mass;
        if (!out.empty() && out.back().index == sum) {
          out.back().mass += mass;
          return;
        }
        if (out.size() == support_cap) throw_explosion(support_cap);
        out.push_back({sum, mass});
      });
  return GridDistribution(g1.step(), std::move(out));
}

GridDistribution convolve_many(std::span<const GridDistribution> grids,
                               std::size_t support_cap) {
  if (grids.empty()) throw std::invalid_argument("convolve_many needs at least one distribution");
  GridDistribution acc = grids.front();
  for (std::size_t i = 1; i < grids.size(); ++i) acc = convolve(acc, grids[i], support_cap);
  return acc;
}

DiscreteDistribution dominant_shift(const DiscreteDistribution& empirical, double shift,
                                    double upper_bound) {
  if (!(shift >= 0.0)) throw std::invalid_argument("dominance shift must be non-negative");
  if (empirical.max_value() > upper_bound) {
    throw std::invalid_argument(fmt::format("support exceeds upper bound {} (max atom {})",
                                            upper_bound, empirical.max_value()));
  }
  std::vector<Atom> out;
  out.reserve(empirical.support_size() + 1);
  double cum = 0.0;
  double shifted_prev = 0.0;
  double at_bound = 0.0;
  for (const Atom& a : empirical.atoms()) {
    if (a.value >= upper_bound) {
      at_bound += a.mass;
      continue;
    }
    cum += a.mass;
    const double shifted = std::max(cum - shift, 0.0);
    const double mass = shifted - shifted_prev;
    if (mass > 0.0) out.push_back({a.value, mass});
    shifted_prev = shifted;
  }
  const double bound_mass = at_bound + std::min(shift, cum);
  if (bound_mass > 0.0) out.push_back({upper_bound, bound_mass});
  return DiscreteDistribution(DiscreteDistribution::Canonical{}, std::move(out));
}

GridDistribution discretize_up(const DiscreteDistribution& dist, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  std::vector<GridAtom> out;
  out.reserve(dist.support_size());
  for (const Atom& a : dist.atoms()) {
    auto k = static_cast<std::int64_t>(std::ceil(a.value / epsilon));
    // The division can round either way; pin k so that (k-1)eps < x <= k eps
    // holds for the stored products themselves.
    while (static_cast<double>(k) * epsilon < a.value) ++k;
    while (static_cast<double>(k - 1) * epsilon >= a.value) --k;
    if (!out.empty() && out.back().index == k) {
      out.back().mass += a.mass;
    } else {
      out.push_back({k, a.mass});
    }
  }
  return GridDistribution(epsilon, std::move(out));
}

double gaussian_cvar(const GaussianParams& params, RiskLevel alpha) {
  const double a = alpha.value();
  return params.mean - params.std_dev / a * std_normal_pdf(std_normal_quantile(a));
}

}  // namespace cvarbandit
