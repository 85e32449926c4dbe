#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "cvarbandit/counter_rng.hpp"
#include "cvarbandit/dist_core.hpp"
#include "cvarbandit/verification.hpp"

using namespace cvarbandit;

namespace {

DiscreteDistribution dist(std::vector<Atom> atoms) { return DiscreteDistribution(std::move(atoms)); }

void require_same(const DiscreteDistribution& a, const DiscreteDistribution& b, double tol) {
  REQUIRE(a.support_size() == b.support_size());
  for (std::size_t i = 0; i < a.support_size(); ++i) {
    CHECK(std::abs(a.atoms()[i].value - b.atoms()[i].value) <= tol);
    CHECK(std::abs(a.atoms()[i].mass - b.atoms()[i].mass) <= tol);
  }
}

const double kAlphas[] = {0.01, 0.05, 0.1, 0.25, 0.3, 0.5, 0.7, 0.9, 0.99};

}  // namespace

TEST_CASE("distribution construction sorts, merges and validates") {
  const auto d = dist({{1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}, {2.0, 0.0}});
  REQUIRE(d.support_size() == 2);
  CHECK(d.atoms()[0] == Atom{0.0, 0.5});
  CHECK(d.atoms()[1] == Atom{1.0, 0.5});

  CHECK_THROWS_AS(dist({}), std::invalid_argument);
  CHECK_THROWS_AS(dist({{0.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(dist({{0.0, 1.5}, {1.0, -0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(dist({{NAN, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(dist({{INFINITY, 1.0}}), std::invalid_argument);
  CHECK_NOTHROW(dist({{0.0, 0.5}, {1.0, 0.5 + 5e-10}}));
  CHECK_THROWS_AS(RiskLevel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(RiskLevel(1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianParams(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("empirical distribution counts multiplicities") {
  const std::vector<double> s{0.5, 0.5, 1.0};
  const auto d = empirical_distribution(s);
  REQUIRE(d.support_size() == 2);
  CHECK(d.atoms()[0].value == 0.5);
  CHECK(d.atoms()[0].mass == doctest::Approx(2.0 / 3.0));
  CHECK(d.atoms()[1].mass == doctest::Approx(1.0 / 3.0));

  const std::vector<double> one{0.7};
  CHECK(empirical_distribution(one) == DiscreteDistribution::point_mass(0.7));

  CHECK_THROWS_WITH(empirical_distribution(std::vector<double>{}), "no samples");

  SequentialStream rng(3);
  std::vector<double> draws;
  for (int i = 0; i < 1000; ++i) draws.push_back(rng.uniform() < 0.3 ? 1.0 : 0.0);
  const auto b = empirical_distribution(draws);
  CHECK(std::abs(b.atoms().back().mass - 0.3) <= 3.0 * std::sqrt(0.21 / 1000));
}

TEST_CASE("value at risk takes the smallest atom reaching alpha") {
  const auto b = DiscreteDistribution::bernoulli(0.5);
  CHECK(var_discrete(b, RiskLevel(0.5)) == 0.0);
  CHECK(var_discrete(b, RiskLevel(0.75)) == 1.0);
  CHECK(var_discrete(dist({{0.2, 0.1}, {0.4, 0.3}, {0.9, 0.6}}), RiskLevel(0.35)) == 0.4);
}

TEST_CASE("discrete CVaR examples") {
  const auto b = DiscreteDistribution::bernoulli(0.5);
  CHECK(cvar_discrete(b, RiskLevel(0.5)) == doctest::Approx(0.0));
  CHECK(cvar_discrete(b, RiskLevel(0.75)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  for (double a : kAlphas) {
    CHECK(cvar_discrete(DiscreteDistribution::point_mass(0.37), RiskLevel(a)) ==
          doctest::Approx(0.37).epsilon(1e-12));
  }
  const auto d = dist({{0.2, 0.1}, {0.4, 0.3}, {0.9, 0.6}});
  CHECK(std::abs(cvar_discrete(d, RiskLevel(1.0 - 1e-12)) - d.mean()) <= 1e-6);
}

TEST_CASE("CVaR properties on random distributions") {
  SequentialStream rng(101);
  for (int i = 0; i < 300; ++i) {
    const auto d = verify::random_distribution(rng, 12, -2.0, 3.0);
    double previous = -INFINITY;
    for (double a : kAlphas) {
      const RiskLevel alpha(a);
      const double c = cvar_discrete(d, alpha);
      CHECK(c <= d.mean() + 1e-12);
      CHECK(c >= d.min_value() - 1e-12);
      CHECK(c >= previous - 1e-12);
      previous = c;
      CHECK(std::abs(cvar_discrete(d.shifted(1.75), alpha) - (c + 1.75)) <= 1e-9);
      CHECK(std::abs(cvar_discrete(d.scaled(2.5), alpha) - 2.5 * c) <= 1e-9);
    }
  }
}

TEST_CASE("first-order dominance orders CVaR") {
  SequentialStream rng(102);
  for (int i = 0; i < 200; ++i) {
    const auto d = verify::random_distribution(rng, 10);
    const double c = rng.uniform() * 0.5;
    const auto shifted = dominant_shift(d, c, 1.0);
    const auto rounded = discretize_up(d, 0.05).to_distribution();
    for (const Atom& a : d.atoms()) {
      CHECK(shifted.cdf(a.value) <= d.cdf(a.value) + 1e-12);
      CHECK(rounded.cdf(a.value) <= d.cdf(a.value) + 1e-12);
    }
    for (double a : kAlphas) {
      CHECK(cvar_discrete(shifted, RiskLevel(a)) >= cvar_discrete(d, RiskLevel(a)) - 1e-12);
      CHECK(cvar_discrete(rounded, RiskLevel(a)) >= cvar_discrete(d, RiskLevel(a)) - 1e-12);
    }
  }
}

TEST_CASE("convolution examples") {
  const auto b = DiscreteDistribution::bernoulli(0.5);
  const auto sum = convolve(b, b);
  CHECK(sum == dist({{0.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}}));

  const auto d = dist({{0.1, 0.2}, {0.4, 0.5}, {0.8, 0.3}});
  CHECK(convolve(d, DiscreteDistribution::point_mass(0.0)) == d);

  const std::vector<DiscreteDistribution> three{b, b, b};
  const auto binomial = convolve_many(three);
  REQUIRE(binomial.support_size() == 4);
  const double expected[] = {0.125, 0.375, 0.375, 0.125};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(binomial.atoms()[i].value == static_cast<double>(i));
    CHECK(binomial.atoms()[i].mass == doctest::Approx(expected[i]).epsilon(1e-15));
  }
  const std::vector<DiscreteDistribution> single{d};
  CHECK(convolve_many(single) == d);
  CHECK_THROWS(convolve_many(std::span<const DiscreteDistribution>{}));
}

TEST_CASE("convolution algebra on random distributions") {
  SequentialStream rng(103);
  for (int i = 0; i < 100; ++i) {
    const auto a = verify::random_distribution(rng, 8);
    const auto b = verify::random_distribution(rng, 8);
    const auto c = verify::random_distribution(rng, 8);
    const auto ab = convolve(a, b);
    require_same(ab, convolve(b, a), 1e-12);
    require_same(convolve(ab, c), convolve(a, convolve(b, c)), 1e-9);
    CHECK(std::abs(ab.total_mass() - 1.0) <= 1e-9);
    CHECK(std::abs(ab.mean() - (a.mean() + b.mean())) <= 1e-9);
    CHECK(ab.support_size() <= a.support_size() * b.support_size());

    const std::vector<DiscreteDistribution> abc{a, b, c}, cab{c, a, b};
    require_same(convolve_many(abc), convolve_many(cab), 1e-9);
  }
}

TEST_CASE("convolution merges values closer than the tolerance") {
  // 0.1 + 0.2 and 0.0 + 0.3 differ only in the last bit.
  const auto c = convolve(dist({{0.0, 0.5}, {0.1, 0.5}}), dist({{0.2, 0.5}, {0.3, 0.5}}));
  REQUIRE(c.support_size() == 3);
  CHECK(c.atoms()[1].mass == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("support cap raises support explosion") {
  std::vector<Atom> atoms;
  for (int i = 0; i < 100; ++i) atoms.push_back({i * 1e-3 + 1e-7 * i * i, 0.01});
  const DiscreteDistribution d(atoms);
  std::vector<Atom> coarse;
  for (int i = 0; i < 100; ++i) coarse.push_back({static_cast<double>(i), 0.01});
  CHECK_THROWS_AS(convolve(d, DiscreteDistribution(coarse), 5000), SupportExplosion);
  CHECK_NOTHROW(convolve(d, DiscreteDistribution(coarse), 10000));
}

TEST_CASE("dominant shift examples") {
  const auto a = dominant_shift(DiscreteDistribution::point_mass(0.5), 0.3, 1.0);
  REQUIRE(a.support_size() == 2);
  CHECK(a.atoms()[0].value == 0.5);
  CHECK(a.atoms()[0].mass == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(a.atoms()[1].value == 1.0);
  CHECK(a.atoms()[1].mass == doctest::Approx(0.3).epsilon(1e-15));

  const auto b = dominant_shift(dist({{0.2, 0.5}, {0.6, 0.5}}), 0.6, 1.0);
  REQUIRE(b.support_size() == 2);
  CHECK(b.atoms()[0].value == 0.6);
  CHECK(b.atoms()[0].mass == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(b.atoms()[1].mass == doctest::Approx(0.6).epsilon(1e-15));

  const auto d = dist({{0.1, 0.3}, {0.5, 0.3}, {1.0, 0.4}});
  CHECK(dominant_shift(d, 0.0, 1.0) == d);
  const auto e = dist({{0.1, 0.3}, {0.5, 0.7}});
  CHECK(dominant_shift(e, 0.0, 1.0) == e);

  CHECK(dominant_shift(d, 1.0, 1.0) == DiscreteDistribution::point_mass(1.0));
  CHECK(dominant_shift(d, 7.5, 1.0) == DiscreteDistribution::point_mass(1.0));
  CHECK(dominant_shift(d, 0.2, 2.0).max_value() == 2.0);

  CHECK_THROWS(dominant_shift(d, -0.1, 1.0));
  CHECK_THROWS(dominant_shift(d, 0.1, 0.9));
}

TEST_CASE("discretize up rounds atoms to the grid") {
  const auto g = discretize_up(dist({{0.1, 0.5}, {0.3, 0.5}}), 0.25);
  REQUIRE(g.support_size() == 2);
  CHECK(g.atoms()[0] == GridAtom{1, 0.5});
  CHECK(g.atoms()[1] == GridAtom{2, 0.5});
  CHECK(g.to_distribution() == dist({{0.25, 0.5}, {0.5, 0.5}}));

  const auto on_grid = dist({{0.0, 0.2}, {0.25, 0.3}, {0.75, 0.5}});
  CHECK(discretize_up(on_grid, 0.25).to_distribution() == on_grid);

  // Merges atoms that land in the same cell.
  const auto merged = discretize_up(dist({{0.01, 0.5}, {0.02, 0.5}}), 0.1);
  REQUIRE(merged.support_size() == 1);
  CHECK(merged.atoms()[0] == GridAtom{1, 1.0});
}

TEST_CASE("discretization moves each atom by less than epsilon and keeps the CVaR sandwich") {
  SequentialStream rng(104);
  for (int i = 0; i < 200; ++i) {
    const auto d = verify::random_distribution(rng, 20);
    for (double eps : {0.1, 0.01, 1e-3, 0.3}) {
      const auto g = discretize_up(d, eps);
      for (const Atom& a : d.atoms()) {
        // The cell holding this atom: smallest grid value not below it.
        const double up = std::ceil(a.value / eps);
        CHECK(up * eps - a.value < eps + 1e-15);
      }
      for (std::size_t k = 0; k < g.support_size(); ++k) {
        CHECK(g.value_at(k) == static_cast<double>(g.atoms()[k].index) * eps);
      }
      const RiskLevel alpha(0.3);
      const double before = cvar_discrete(d, alpha);
      const double after = cvar_discrete(g.to_distribution(), alpha);
      CHECK(after >= before);
      CHECK(after <= before + eps / alpha.value());
    }
  }
}

TEST_CASE("standard normal helpers") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
  CHECK(std::abs(std_normal_quantile(0.975) - 1.959963985) <= 1e-8);
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(-0.5), std::domain_error);
}

namespace {

// Maclaurin series for erf, independent of the libm implementation.
double series_erf(double x) {
  double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-18) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

template <typename Cdf>
double bisect_quantile(Cdf cdf, double p, double range = 40.0) {
  double lo = -range, hi = range;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal quantile against bisection") {
  const auto series_cdf = [](double x) { return 0.5 * (1.0 + series_erf(x / std::sqrt(2.0))); };
  CHECK(std::abs(bisect_quantile(series_cdf, 0.975, 6.0) - 1.959963985) <= 1e-8);
  for (double p : {0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.99}) {
    CHECK(std::abs(std_normal_quantile(p) - bisect_quantile(series_cdf, p, 6.0)) <= 1e-9);
  }
  // The series loses precision in the far tails; use erfc there.
  const auto erfc_cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  for (double p = 1e-10; p < 1.0; p *= 1.7) {
    CHECK(std::abs(std_normal_quantile(p) - bisect_quantile(erfc_cdf, p)) <= 1e-9);
  }
  for (double q = 1e-10; q < 0.5; q *= 1.7) {
    const double p = 1.0 - q;
    const auto upper = [](double x) { return -0.5 * std::erfc(x / std::sqrt(2.0)); };
    CHECK(std::abs(std_normal_quantile(p) - bisect_quantile(upper, -(1.0 - p))) <= 1e-9);
  }
}

TEST_CASE("Gaussian CVaR closed form") {
  const double base = gaussian_cvar(GaussianParams(0, 1), RiskLevel(0.5));
  CHECK(std::abs(base + 2.0 / std::sqrt(2.0 * std::numbers::pi)) <= 1e-6);
  CHECK(std::abs(base - -0.7978845608) <= 1e-6);
  CHECK(gaussian_cvar(GaussianParams(5, 1), RiskLevel(0.5)) == doctest::Approx(5 + base));
  CHECK(gaussian_cvar(GaussianParams(0, 2), RiskLevel(0.5)) == doctest::Approx(2 * base));
  for (double a : kAlphas) {
    const RiskLevel alpha(a);
    CHECK(gaussian_cvar(GaussianParams(1.0, 0.5), alpha) < 1.0);
    CHECK(gaussian_cvar(GaussianParams(1.1, 0.5), alpha) >
          gaussian_cvar(GaussianParams(1.0, 0.5), alpha));
    CHECK(gaussian_cvar(GaussianParams(1.0, 0.6), alpha) <
          gaussian_cvar(GaussianParams(1.0, 0.5), alpha));
  }
}
