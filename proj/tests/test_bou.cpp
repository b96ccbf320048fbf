#include "doctest.h"

#include <cmath>
#include <vector>

#include "bfl/bou.hpp"
#include "test_oracles.hpp"

using namespace bfl;

TEST_CASE("ou_transition closed cases") {
  RngStream rng(91, 0);
  const OUParams p{0.4, 1.0, 1.0};
  CHECK(ou_transition(3.1, p, 0.0, rng) == 3.1);
  CHECK(ou_transition_mean(2.0, p, 1.0) ==
        doctest::Approx(2.0 * std::exp(-0.4)));
  // stationary variance limit sigma^2 / (2 mu)
  CHECK(ou_transition_variance(p, 1e9) == doctest::Approx(1.0 / 0.8));
  CHECK_THROWS_AS(ou_transition(0.0, p, -1.0, rng), std::invalid_argument);
  OUParams bad{-1.0, 1.0, 1.0};
  CHECK_THROWS_AS(ou_transition(0.0, bad, 1.0, rng), std::invalid_argument);
}

TEST_CASE("mu = 0 transition is Brownian: variance sigma^2 delta") {
  RngStream rng(92, 0);
  const OUParams p{0.0, 1.5, 1.0};
  const double delta = 0.7;
  CHECK(ou_transition_variance(p, delta) == doctest::Approx(2.25 * delta));
  const std::size_t reps = 50000;
  std::vector<double> sq(reps);
  for (auto& v : sq) {
    const double x = ou_transition(0.0, p, delta, rng);
    v = x * x;
  }
  const auto [mean, se] = oracle::mean_se(sq);
  CHECK(std::abs(mean - 2.25 * delta) < 3.0 * se);
}

TEST_CASE("pulled transition mean decays like e^{-mu delta}") {
  RngStream rng(93, 0);
  const BOUConfig cfg{100, 2.0};
  const OUParams p{cfg.mu(), 1.0, 1.0};
  const double delta = std::pow(std::log(100.0), 2.0);  // one relaxation time
  const std::size_t reps = 50000;
  const double x0 = 5.0;
  std::vector<double> xs(reps);
  for (auto& v : xs) v = ou_transition(x0, p, delta, rng);
  const auto [mean, se] = oracle::mean_se(xs);
  // mu * delta = gamma, so the mean contracts by e^{-gamma}
  CHECK(std::abs(mean - x0 * std::exp(-2.0)) < 3.0 * se);
}

TEST_CASE("GenealogyBuffer: sibling split age and self query") {
  GenealogyBuffer buf(3, 0.0);
  CHECK(buf.population() == 3);
  CHECK(buf.mrca_age(1, 1, 10.0) == 0.0);
  // roots are distinct: pairs are censored until lineages share a split
  CHECK(std::isinf(buf.mrca_age(0, 1, 10.0)));
  // particle 0 duplicates into slot 2 at t = 4
  buf.branch(0, 2, 4.0);
  CHECK(buf.mrca_age(0, 2, 10.0) == doctest::Approx(6.0));
  CHECK(std::isinf(buf.mrca_age(0, 1, 10.0)));
  CHECK_THROWS_AS(buf.mrca_age(0, 9, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(buf.branch(9, 0, 5.0), std::invalid_argument);
}

TEST_CASE("GenealogyBuffer tracks nested splits") {
  GenealogyBuffer buf(4, 0.0);
  buf.branch(0, 1, 1.0);  // 0 and 1 split at 1
  buf.branch(0, 2, 2.0);  // 0 and 2 split at 2
  buf.branch(3, 3, 2.5);  // self-replacement: unary node only
  CHECK(buf.mrca_age(0, 2, 3.0) == doctest::Approx(1.0));
  CHECK(buf.mrca_age(0, 1, 3.0) == doctest::Approx(2.0));
  CHECK(buf.mrca_age(1, 2, 3.0) == doctest::Approx(2.0));
  CHECK(std::isinf(buf.mrca_age(0, 3, 3.0)));
}

TEST_CASE("compaction preserves every pairwise MRCA age") {
  RngStream rng(94, 0);
  const std::size_t N = 12;
  GenealogyBuffer a(N, 0.0), b(N, 0.0);
  double t = 0.0;
  for (int e = 0; e < 3000; ++e) {
    t += 0.01;
    const std::size_t i = std::size_t(rng.uniform_co() * double(N));
    const std::size_t s = std::size_t(rng.uniform_co() * double(N));
    a.branch(i, s, t);
    b.branch(i, s, t);
    if (e % 40 == 0) b.compact();
  }
  b.compact();
  CHECK(b.live_node_count() <= a.live_node_count());
  CHECK(b.live_node_count() <= 4 * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double ga = a.mrca_age(i, j, t);
      const double gb = b.mrca_age(i, j, t);
      if (std::isinf(ga))
        CHECK(std::isinf(gb));
      else
        CHECK(gb == doctest::Approx(ga));
    }
}

TEST_CASE("bou_run smoke: finite ages, sane censoring, population fixed") {
  RngStream rng(95, 0);
  BOUConfig cfg;
  cfg.N = 16;
  cfg.gamma_pull = 1.0;
  cfg.horizon = 400.0;
  cfg.pair_samples = 512;
  const BouResult res = bou_run(cfg, rng);
  CHECK(res.avg_mrca_age > 0.0);
  CHECK(res.avg_mrca_age < cfg.horizon);
  CHECK(res.standard_error > 0.0);
  CHECK(res.censored_fraction < 0.5);
}

TEST_CASE("bou_run is deterministic per stream") {
  BOUConfig cfg;
  cfg.N = 8;
  cfg.gamma_pull = 0.5;
  cfg.horizon = 100.0;
  cfg.pair_samples = 128;
  RngStream r1(96, 2), r2(96, 2);
  const BouResult a = bou_run(cfg, r1);
  const BouResult b = bou_run(cfg, r2);
  CHECK(a.avg_mrca_age == b.avg_mrca_age);
  CHECK(a.censored_fraction == b.censored_fraction);
}

TEST_CASE("bou_run validates the configuration") {
  RngStream rng(97, 0);
  BOUConfig bad;
  bad.N = 1;
  CHECK_THROWS_AS(bou_run(bad, rng), std::invalid_argument);
  BOUConfig bad2;
  bad2.N = 4;
  bad2.gamma_pull = 0.0;
  CHECK_THROWS_AS(bou_run(bad2, rng), std::invalid_argument);
}

TEST_CASE("short horizons raise the censoring warning") {
  RngStream rng(98, 0);
  BOUConfig cfg;
  cfg.N = 32;
  cfg.gamma_pull = 1.0;
  cfg.horizon = 2.0;  // far too short for lineages to merge
  cfg.pair_samples = 256;
  const BouResult res = bou_run(cfg, rng);
  CHECK(res.horizon_warning);
  CHECK(res.censored_fraction > 0.5);
}
