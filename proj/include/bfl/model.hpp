#pragma once

// Shared domain types of the (N,a)-exponential model.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bfl {

/// Population size N and pulling parameter a. a = 0 is the neutral
/// (uniform-weight) limit; the coalescent regimes assume a > 0.
struct ModelParams {
  std::size_t N = 1;
  double a = 0.0;

  void validate() const {
    if (N < 1) throw std::invalid_argument("ModelParams: N must be >= 1");
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("ModelParams: a must be finite and >= 0");
  }
};

/// Normalized selection probabilities theta: the Cannings reproduction law.
/// All entries positive, summing to 1.
struct WeightVector {
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

}  // namespace bfl
