#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "bfl/coalescent.hpp"
#include "test_oracles.hpp"

using namespace bfl;

TEST_CASE("Kingman rates: only pairwise mergers") {
  const auto m = LambdaMeasure::kingman();
  CHECK(lambda_rate(m, 2, 2) == 1.0);
  CHECK(lambda_rate(m, 10, 2) == 1.0);
  CHECK(lambda_rate(m, 10, 3) == 0.0);
  CHECK(lambda_rate(m, 10, 10) == 0.0);
}

TEST_CASE("lambda_rate validates its arguments") {
  const auto m = LambdaMeasure::bolthausen_sznitman();
  CHECK_THROWS_AS(lambda_rate(m, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(lambda_rate(m, 3, 4), std::invalid_argument);
  CHECK_THROWS_AS(LambdaMeasure::beta(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LambdaMeasure::beta(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("Bolthausen-Sznitman closed form (k-2)!(b-k)!/(b-1)!") {
  const auto m = LambdaMeasure::bolthausen_sznitman();
  CHECK(lambda_rate(m, 2, 2) == doctest::Approx(1.0));
  CHECK(lambda_rate(m, 3, 2) == doctest::Approx(0.5));
  CHECK(lambda_rate(m, 3, 3) == doctest::Approx(0.5));
  for (std::size_t b = 2; b <= 12; ++b)
    for (std::size_t k = 2; k <= b; ++k) {
      const double expected = std::exp(std::lgamma(double(k) - 1.0) +
                                       std::lgamma(double(b - k) + 1.0) -
                                       std::lgamma(double(b)));
      CHECK(lambda_rate(m, b, k) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("Beta rates agree with direct quadrature of the integral") {
  // lambda_{b,k} = int_0^1 x^{k-2}(1-x)^{b-k} Beta(a',b')(dx); oracle is
  // composite Simpson on the integrand with the density written explicitly
  const double ap = 2.0 - 1.0 / 0.75, bp = 1.0 / 0.75;  // a = 3/4 limit
  const auto m = LambdaMeasure::beta(ap, bp);
  const double lognorm =
      std::lgamma(ap) + std::lgamma(bp) - std::lgamma(ap + bp);
  for (std::size_t b : {3, 5, 9})
    for (std::size_t k = 2; k <= b; ++k) {
      // substitute x = sin^2(theta) so the integrable endpoint singularity
      // of x^{a'-1} disappears: integrand 2 sin^{2A-1} cos^{2B-1}
      const double A = ap + double(k) - 2.0, B = bp + double(b - k);
      const auto f = [&](double th) {
        const double s = std::sin(th), c = std::cos(th);
        return 2.0 * std::pow(s, 2.0 * A - 1.0) * std::pow(c, 2.0 * B - 1.0) /
               std::exp(lognorm);
      };
      const double val = oracle::simpson(f, 0.0, std::asin(1.0), 100000);
      CHECK(lambda_rate(m, b, k) == doctest::Approx(val).epsilon(1e-6));
    }
}

TEST_CASE("consistency: lambda_{b,k} = lambda_{b+1,k} + lambda_{b+1,k+1}") {
  for (double a : {0.6, 0.75, 0.9, 1.0}) {
    const auto m = LambdaMeasure::from_pulling_parameter(a);
    for (std::size_t b = 2; b <= 20; ++b)
      for (std::size_t k = 2; k <= b; ++k) {
        const double lhs = lambda_rate(m, b, k);
        const double rhs =
            lambda_rate(m, b + 1, k) + lambda_rate(m, b + 1, k + 1);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
  }
}

TEST_CASE("from_pulling_parameter regime selection") {
  CHECK(LambdaMeasure::from_pulling_parameter(0.3).kind ==
        LambdaMeasure::Kind::Kingman);
  CHECK(LambdaMeasure::from_pulling_parameter(0.5).kind ==
        LambdaMeasure::Kind::Kingman);
  const auto m = LambdaMeasure::from_pulling_parameter(0.75);
  CHECK(m.kind == LambdaMeasure::Kind::Beta);
  CHECK(m.alpha_prime == doctest::Approx(2.0 - 4.0 / 3.0));
  CHECK(m.beta_prime == doctest::Approx(4.0 / 3.0));
  const auto bs = LambdaMeasure::from_pulling_parameter(1.0);
  CHECK(bs.alpha_prime == doctest::Approx(1.0));
  CHECK(bs.beta_prime == doctest::Approx(1.0));
  CHECK_THROWS_AS(LambdaMeasure::from_pulling_parameter(1.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(LambdaMeasure::from_pulling_parameter(0.0),
                  std::invalid_argument);
}

TEST_CASE("total_merge_rates closed cases") {
  const auto kg = total_merge_rates(LambdaMeasure::kingman(), 4);
  REQUIRE(kg.size() == 3);
  CHECK(kg[0] == doctest::Approx(6.0));  // C(4,2)
  CHECK(kg[1] == 0.0);
  CHECK(kg[2] == 0.0);

  const auto bs = total_merge_rates(LambdaMeasure::bolthausen_sznitman(), 3);
  REQUIRE(bs.size() == 2);
  CHECK(bs[0] == doctest::Approx(1.5));  // 3 * 1/2
  CHECK(bs[1] == doctest::Approx(0.5));  // 1 * 1/2
}

TEST_CASE("Kingman pair absorption time is Exp(1): mean 1") {
  RngStream rng(71, 0);
  const std::size_t reps = 40000;
  std::vector<double> times(reps);
  for (auto& t : times) {
    const auto path =
        simulate_block_counting(LambdaMeasure::kingman(), 2, 1e9, rng);
    REQUIRE(path.events.size() == 1);
    t = path.events[0].first;
  }
  const auto [mean, se] = oracle::mean_se(times);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("block counts are strictly decreasing along a path") {
  RngStream rng(72, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto path = simulate_block_counting(
        LambdaMeasure::beta(0.7, 1.6), 15, 1e9, rng);
    std::size_t prev = 15;
    for (const auto& [t, b] : path.events) {
      CHECK(b < prev);
      prev = b;
    }
    CHECK(prev == 1);
  }
}

TEST_CASE("count_at reads off the path correctly") {
  BlockCountPath path;
  path.events = {{0.5, 3}, {1.25, 1}};
  CHECK(path.count_at(0.0, 5) == 5);
  CHECK(path.count_at(0.5, 5) == 3);
  CHECK(path.count_at(1.0, 5) == 3);
  CHECK(path.count_at(2.0, 5) == 1);
}

TEST_CASE("BS block count at t = 1 matches an independent sampler") {
  // oracle: a from-scratch Gillespie sampler for the Bolthausen-Sznitman
  // block count using factorial-form rates and std::mt19937
  std::mt19937 gen(2024);
  std::exponential_distribution<double> exp_dist(1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const std::size_t n = 10, reps = 60000;
  const double t_query = 1.0;

  std::vector<double> fact(n + 1, 1.0);
  for (std::size_t i = 2; i <= n; ++i) fact[i] = fact[i - 1] * double(i);

  std::vector<double> oracle_counts(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    std::size_t b = n;
    double t = 0.0;
    while (b > 1) {
      std::vector<double> rates(b - 1);
      double total = 0.0;
      for (std::size_t k = 2; k <= b; ++k) {
        const double choose = fact[b] / (fact[k] * fact[b - k]);
        const double lam =
            fact[k - 2] * fact[b - k] / fact[b - 1];
        rates[k - 2] = choose * lam;
        total += rates[k - 2];
      }
      t += exp_dist(gen) / total;
      if (t > t_query) break;
      double u = uni(gen) * total;
      std::size_t k = 2;
      for (std::size_t i = 0; i < rates.size(); ++i) {
        if (u < rates[i] || i + 1 == rates.size()) {
          k = i + 2;
          break;
        }
        u -= rates[i];
      }
      b = b - k + 1;
    }
    oracle_counts[r] = double(b);
  }

  RngStream rng(73, 0);
  std::vector<double> lib_counts(reps);
  for (auto& c : lib_counts) {
    const auto path = simulate_block_counting(
        LambdaMeasure::bolthausen_sznitman(), n, t_query, rng);
    c = double(path.count_at(t_query, n));
  }

  const auto o = oracle::mean_se(oracle_counts);
  const auto l = oracle::mean_se(lib_counts);
  CHECK(std::abs(o.mean - l.mean) < 3.0 * std::hypot(o.se, l.se));
}
