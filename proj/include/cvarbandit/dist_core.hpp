#pragma once

// Finite-support probability distributions and the arithmetic the CVaR
// bandit algorithms need: sums of independent variables (convolution),
// first-order dominant confidence bounds, epsilon-grid round-up, and
// value-at-risk / conditional value-at-risk of the lower tail.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvarbandit {

// Values closer than this are treated as the same atom when summing.
inline constexpr double kMergeTolerance = 1e-12;
// Masses must add up to one within this tolerance.
inline constexpr double kMassTolerance = 1e-9;
// Library policy on the largest support a convolution may produce.
inline constexpr std::size_t kDefaultSupportCap = 5'000'000;

class SupportExplosion : public std::runtime_error {
 public:
  explicit SupportExplosion(const std::string& what) : std::runtime_error(what) {}
};

// Risk level alpha in the open interval (0, 1).
class RiskLevel {
 public:
  explicit RiskLevel(double alpha);
  double value() const { return alpha_; }
  bool operator==(const RiskLevel&) const = default;

 private:
  double alpha_;
};

struct GaussianParams {
  GaussianParams(double mean, double std_dev);

  double mean;
  double std_dev;

  bool operator==(const GaussianParams&) const = default;
};

struct Atom {
  double value;
  double mass;

  bool operator==(const Atom&) const = default;
};

// Sorted, strictly increasing atoms with positive masses summing to one.
class DiscreteDistribution {
 public:
  // Sorts, merges exactly equal values and drops zero masses. Throws
  // std::invalid_argument on negative or non-finite entries or when the
  // total mass is not one.
  explicit DiscreteDistribution(std::vector<Atom> atoms);

  static DiscreteDistribution point_mass(double value);
  static DiscreteDistribution bernoulli(double p);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }
  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }
  double mean() const;
  double total_mass() const;
  // P(X <= x).
  double cdf(double x) const;

  DiscreteDistribution shifted(double offset) const;
  DiscreteDistribution scaled(double factor) const;

  bool operator==(const DiscreteDistribution&) const = default;

 private:
  struct Canonical {};
  DiscreteDistribution(Canonical, std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
  friend class GridDistribution;
  friend DiscreteDistribution convolve(const DiscreteDistribution&,
                                       const DiscreteDistribution&, std::size_t);
  friend DiscreteDistribution dominant_shift(const DiscreteDistribution&, double,
                                             double);

  std::vector<Atom> atoms_;
};

struct GridAtom {
  std::int64_t index;
  double mass;

  bool operator==(const GridAtom&) const = default;
};

// A distribution whose atoms sit on multiples of a fixed step. Atom values
// are kept as integer indices so sums stay exactly on the grid.
class GridDistribution {
 public:
  GridDistribution(double step, std::vector<GridAtom> atoms);

  double step() const { return step_; }
  std::span<const GridAtom> atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }
  double value_at(std::size_t i) const {
    return static_cast<double>(atoms_[i].index) * step_;
  }

  DiscreteDistribution to_distribution() const;

 private:
  double step_;
  std::vector<GridAtom> atoms_;
};

DiscreteDistribution empirical_distribution(std::span<const double> samples);

// Smallest atom v with P(X <= v) >= alpha.
double var_discrete(const DiscreteDistribution& dist, RiskLevel alpha);

// (1/alpha) [ sum_{x <= v} x f(x) - (sum_{x <= v} f(x) - alpha) v ], v = VaR.
double cvar_discrete(const DiscreteDistribution& dist, RiskLevel alpha);

// Distribution of X + Y for independent X ~ d1, Y ~ d2. Throws
// SupportExplosion once the merged support exceeds `support_cap` atoms.
DiscreteDistribution convolve(const DiscreteDistribution& d1,
                              const DiscreteDistribution& d2,
                              std::size_t support_cap = kDefaultSupportCap);

DiscreteDistribution convolve_many(std::span<const DiscreteDistribution> dists,
                                   std::size_t support_cap = kDefaultSupportCap);

// Both operands must share the same step.
GridDistribution convolve(const GridDistribution& g1, const GridDistribution& g2,
                          std::size_t support_cap = kDefaultSupportCap);

GridDistribution convolve_many(std::span<const GridDistribution> grids,
                               std::size_t support_cap = kDefaultSupportCap);

// CDF G(x) = max(F(x) - shift, 0) below `upper_bound`, G(upper_bound) = 1.
// The removed mass is placed at `upper_bound`, so the result first-order
// dominates the input.
DiscreteDistribution dominant_shift(const DiscreteDistribution& empirical, double shift,
                                    double upper_bound);

// Moves every atom x to ceil(x / epsilon) * epsilon.
GridDistribution discretize_up(const DiscreteDistribution& dist, double epsilon);

double std_normal_pdf(double x);
double std_normal_cdf(double x);
// Inverse of the standard normal CDF; throws std::domain_error outside (0, 1).
double std_normal_quantile(double p);

// mu - (sigma / alpha) * phi(Phi^{-1}(alpha)).
double gaussian_cvar(const GaussianParams& params, RiskLevel alpha);

}  // namespace cvarbandit
