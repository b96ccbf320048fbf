#pragma once

// Exact rate computations and block-counting samplers for the limiting
// coalescents: Kingman and Beta(alpha', beta') Lambda-coalescents
// (Bolthausen-Sznitman is Beta(1,1)).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bfl/rng.hpp"

namespace bfl {

struct LambdaMeasure {
  enum class Kind { Kingman, Beta };
  Kind kind = Kind::Kingman;
  double alpha_prime = 0.0;
  double beta_prime = 0.0;

  static LambdaMeasure kingman() { return {Kind::Kingman, 0.0, 0.0}; }

  static LambdaMeasure beta(double alpha_prime, double beta_prime) {
    if (!(alpha_prime > 0.0) || !(beta_prime > 0.0) ||
        !std::isfinite(alpha_prime) || !std::isfinite(beta_prime))
      throw std::invalid_argument(
          "LambdaMeasure: Beta parameters must be finite and positive");
    return {Kind::Beta, alpha_prime, beta_prime};
  }

  static LambdaMeasure bolthausen_sznitman() { return beta(1.0, 1.0); }

  /// Limit coalescent of the (N,a)-exponential model: Kingman for a <= 1/2,
  /// Beta(2 - 1/a, 1/a) for 1/2 < a <= 1.
  static LambdaMeasure from_pulling_parameter(double a) {
    if (!(a > 0.0) || a > 1.0)
      throw std::invalid_argument(
          "LambdaMeasure::from_pulling_parameter: need 0 < a <= 1");
    if (a <= 0.5) return kingman();
    return beta(2.0 - 1.0 / a, 1.0 / a);
  }
};

namespace detail {
inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}
}  // namespace detail

/// Lambda-coalescent merger rate lambda_{b,k} = int x^{k-2}(1-x)^{b-k} L(dx).
/// Beta case: B(alpha'+k-2, beta'+b-k) / B(alpha', beta') via log-Gamma;
/// Kingman: 1 for k = 2, 0 otherwise.
inline double lambda_rate(const LambdaMeasure& measure, std::size_t b,
                          std::size_t k) {
  if (k < 2 || k > b) throw std::invalid_argument("lambda_rate: need 2 <= k <= b");
  if (measure.kind == LambdaMeasure::Kind::Kingman) return k == 2 ? 1.0 : 0.0;
  const double a1 = measure.alpha_prime + double(k) - 2.0;
  const double b1 = measure.beta_prime + double(b) - double(k);
  if (a1 <= 0.0)
    throw std::invalid_argument("lambda_rate: degenerate measure (alpha'+k-2 <= 0)");
  return std::exp(detail::log_beta(a1, b1) -
                  detail::log_beta(measure.alpha_prime, measure.beta_prime));
}

/// Block-counting event rates C(b,k) * lambda_{b,k}, k = 2..b.
inline std::vector<double> total_merge_rates(const LambdaMeasure& measure,
                                             std::size_t b) {
  if (b < 2) throw std::invalid_argument("total_merge_rates: b must be >= 2");
  std::vector<double> rates(b - 1);
  for (std::size_t k = 2; k <= b; ++k) {
    const double lchoose = std::lgamma(double(b) + 1.0) -
                           std::lgamma(double(k) + 1.0) -
                           std::lgamma(double(b - k) + 1.0);
    const double lam = lambda_rate(measure, b, k);
    rates[k - 2] = lam > 0.0 ? std::exp(lchoose + std::log(lam)) : 0.0;
  }
  return rates;
}

/// Continuous-time block-counting path: events (time, block_count) with
/// strictly decreasing counts, starting from n at time 0.
struct BlockCountPath {
  std::vector<std::pair<double, std::size_t>> events;

  std::size_t count_at(double t, std::size_t n0) const {
    std::size_t b = n0;
    for (const auto& [time, count] : events) {
      if (time > t) break;
      b = count;
    }
    return b;
  }
};

/// From b blocks, wait Exp(sum_k C(b,k) lambda_{b,k}) and jump to b - k + 1
/// with probability proportional to C(b,k) lambda_{b,k}.
inline BlockCountPath simulate_block_counting(const LambdaMeasure& measure,
                                              std::size_t n, double horizon,
                                              RngStream& rng) {
  if (n < 1) throw std::invalid_argument("simulate_block_counting: n >= 1");
  if (!(horizon > 0.0))
    throw std::invalid_argument("simulate_block_counting: horizon > 0");
  BlockCountPath path;
  std::size_t b = n;
  double t = 0.0;
  while (b > 1) {
    const std::vector<double> rates = total_merge_rates(measure, b);
    double total = 0.0;
    for (double r : rates) total += r;
    t += rng.exponential() / total;
    if (t > horizon) break;
    double u = rng.uniform_co() * total;
    std::size_t k = 2;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      if (u < rates[i] || i + 1 == rates.size()) {
        k = i + 2;
        break;
      }
      u -= rates[i];
    }
    b = b - k + 1;
    path.events.emplace_back(t, b);
  }
  return path;
}

}  // namespace bfl
