#include "doctest.h"

#include <cmath>
#include <vector>

#include "bfl/analysis.hpp"
#include "bfl/front.hpp"
#include "test_oracles.hpp"

using namespace bfl;

TEST_CASE("equivalent_position closed cases") {
  CHECK(equivalent_position({1.7}, 0.3) == doctest::Approx(0.3 * 1.7));
  // N equal positions at x -> a x + log N
  CHECK(equivalent_position({2.0, 2.0, 2.0, 2.0}, 0.5) ==
        doctest::Approx(1.0 + std::log(4.0)));
  CHECK(equivalent_position({0.0, -std::log(2.0)}, 1.0) ==
        doctest::Approx(std::log(1.5)));
  CHECK_THROWS_AS(equivalent_position({}, 0.5), std::invalid_argument);
}

TEST_CASE("equivalent_position survives huge magnitudes") {
  // a * x around 1500: naive exponentiation would overflow
  CHECK(equivalent_position({3000.0, 2999.0}, 0.5) ==
        doctest::Approx(1500.0 + std::log(1.0 + std::exp(-0.5))));
}

TEST_CASE("selection_weights closed cases") {
  const auto w = selection_weights({1.0, 1.0, 1.0, 1.0}, 0.8);
  for (std::size_t i = 0; i < 4; ++i) CHECK(w[i] == doctest::Approx(0.25));

  const auto v = selection_weights({std::log(2.0), 0.0}, 1.0);
  CHECK(v[0] == doctest::Approx(2.0 / 3.0));
  CHECK(v[1] == doctest::Approx(1.0 / 3.0));

  double sum = 0.0;
  const auto r = selection_weights({0.3, -1.2, 4.0, 2.2, 0.0}, 0.7);
  for (std::size_t i = 0; i < 5; ++i) sum += r[i];
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK_THROWS_AS(selection_weights({}, 0.5), std::invalid_argument);
}

TEST_CASE("selection_weights are translation invariant") {
  const std::vector<double> x = {0.4, -0.9, 2.5, 1.1};
  for (double c : {1.0, -3.7, 256.0}) {
    std::vector<double> shifted = x;
    for (auto& v : shifted) v += c;
    const auto w0 = selection_weights(x, 0.6);
    const auto w1 = selection_weights(shifted, 0.6);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(w1[i] == doctest::Approx(w0[i]).epsilon(1e-13));
  }
}

TEST_CASE("step_front with N = 1: zeta = a p_1") {
  const ModelParams params{1, 0.6};
  RngStream rng(21, 0);
  FrontState s = make_initial_front(params, {2.0});
  for (int i = 0; i < 50; ++i) {
    auto [next, rec] = step_front(s, params, rng);
    const double p1 = next.positions[0] - s.x_eq;
    CHECK(rec.zeta == doctest::Approx(0.6 * p1).epsilon(1e-12));
    CHECK(rec.max == rec.min);
    s = next;
  }
}

TEST_CASE("parent distribution is uniform for equal old positions") {
  const ModelParams params{8, 0.9};
  RngStream rng(22, 0);
  FrontState s = make_initial_front(params, std::vector<double>(8, 0.0));
  std::vector<std::size_t> counts(8, 0);
  const std::size_t reps = 100000 / 8;
  for (std::size_t r = 0; r < reps; ++r) {
    auto [next, rec] = step_front(s, params, rng);
    for (std::size_t k = 0; k < 8; ++k) ++counts[rec.parent_indices[k]];
  }
  const double e = double(reps * 8) / 8.0;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < 8; ++i)
    chi2 += (double(counts[i]) - e) * (double(counts[i]) - e) / e;
  CHECK(chi2 < oracle::chi2_crit_1pct(7));
}

TEST_CASE("E[zeta] matches the exact formula at N = 100, a = 0.5") {
  const ModelParams params{100, 0.5};
  RngStream rng(23, 0);
  const std::size_t reps = 100000;
  std::vector<double> zetas(reps);
  for (auto& z : zetas) z = sample_zeta(params, rng);
  const auto [mean, se] = oracle::mean_se(zetas);
  CHECK(std::abs(mean - analytic_mean_xi(100, 0.5)) < 3.0 * se);
}

TEST_CASE("sample_zeta edge laws") {
  RngStream rng(24, 0);
  // a = 0 -> log N exactly
  CHECK(sample_zeta({17, 0.0}, rng) == std::log(17.0));
  // N = 1 -> a * Gumbel; mean a * gamma
  const ModelParams params{1, 0.35};
  std::vector<double> z(100000);
  for (auto& v : z) v = sample_zeta(params, rng);
  const auto [mean, se] = oracle::mean_se(z);
  CHECK(std::abs(mean - 0.35 * kEulerGamma) < 3.0 * se);
}

TEST_CASE("simulate_front: a = 0 gives x_eq(n) = zeta_n") {
  const ModelParams params{5, 0.0};
  RngStream rng(25, 0);
  const auto recs = simulate_front(params, {5.0, 4.0, 3.0, 2.0, 1.0}, 40, rng);
  for (const auto& r : recs) CHECK(r.x_eq == doctest::Approx(r.zeta));
}

TEST_CASE("simulate_front is deterministic per stream") {
  const ModelParams params{12, 0.7};
  RngStream r1(26, 4), r2(26, 4);
  const std::vector<double> init(12, 0.0);
  const auto a = simulate_front(params, init, 100, r1);
  const auto b = simulate_front(params, init, 100, r2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x_eq == b[i].x_eq);
    CHECK(a[i].max == b[i].max);
    CHECK(a[i].zeta == b[i].zeta);
  }
}

TEST_CASE("simulate_front rejects bad input") {
  const ModelParams params{3, 0.5};
  RngStream rng(27, 0);
  CHECK_THROWS_AS(
      simulate_front(params, {1.0, std::nan(""), 0.0}, 5, rng),
      std::invalid_argument);
  CHECK_THROWS_AS(simulate_front(params, {1.0, 0.5, 0.0}, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("perpetuity and recompute invariants hold along a trajectory") {
  const ModelParams params{50, 0.8};
  RngStream rng(28, 0);
  FrontState s = make_initial_front(params, std::vector<double>(50, 0.0));
  for (int i = 0; i < 100; ++i) {
    auto [next, rec] = step_front(s, params, rng, false);
    // zeta definition is exact by construction
    CHECK(rec.zeta == next.x_eq - params.a * s.x_eq);
    // recompute x_eq from positions
    const double recomputed = equivalent_position(next.positions, params.a);
    CHECK(std::abs(recomputed - next.x_eq) <
          1e-10 * std::max(1.0, std::abs(next.x_eq)));
    // structural identities for the extremes
    CHECK(rec.max == next.positions.front());
    CHECK(rec.min == next.positions.back());
    CHECK(next.positions.front() > next.positions.back());
    s = next;
  }
}

TEST_CASE("constant init shift of c moves x_eq(n) by a^{n+1} c") {
  const ModelParams params{10, 0.6};
  const double c = 2.5;
  std::vector<double> base(10), shifted(10);
  for (int i = 0; i < 10; ++i) {
    base[i] = double(i) * 0.3;
    shifted[i] = base[i] + c;
  }
  RngStream r1(29, 0), r2(29, 0);
  const auto a = simulate_front(params, base, 30, r1);
  const auto b = simulate_front(params, shifted, 30, r2);
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double expected = c * std::pow(params.a, double(n) + 2.0);
    CHECK(std::abs((b[n].x_eq - a[n].x_eq) - expected) <
          1e-12 + 1e-9 * expected);
  }
}

TEST_CASE("initial ties are perturbed into strict order") {
  const ModelParams params{4, 0.5};
  const FrontState s = make_initial_front(params, {1.0, 1.0, 1.0, 1.0});
  for (std::size_t k = 1; k < 4; ++k)
    CHECK(s.positions[k] < s.positions[k - 1]);
}

TEST_CASE("simulate_front_extremes agrees with the record-keeping path") {
  const ModelParams params{40, 0.5};
  RngStream r1(30, 0);
  const auto ex = simulate_front_extremes(params, 50, r1);
  CHECK(ex.max > ex.min);
  CHECK(std::isfinite(ex.max - ex.x_eq_prev));
  // statistical agreement of the two paths on E[M]
  const std::size_t reps = 3000;
  std::vector<double> fast(reps), slow(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream ra(31, r), rb(131, r);
    fast[r] = simulate_front_extremes(params, 30, ra).max;
    slow[r] =
        simulate_front(params, std::vector<double>(40, 0.0), 31, rb).back().max;
  }
  const auto f = oracle::mean_se(fast);
  const auto s = oracle::mean_se(slow);
  CHECK(std::abs(f.mean - s.mean) < 3.0 * std::hypot(f.se, s.se));
}
