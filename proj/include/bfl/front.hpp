#pragma once

// Forward simulation of the (N,a)-exponential model front: ranked positions,
// equivalent position, increments zeta, parent labels and extremal statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bfl/model.hpp"
#include "bfl/rng.hpp"
#include "bfl/vecmath.hpp"

namespace bfl {

/// Overflow-safe log(sum(exp(v))): max-shifted before exponentiating.
inline double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

/// Equivalent position of the front: log sum_j e^{a x_j}. A single fictional
/// particle at this position generates the whole next generation.
inline double equivalent_position(const std::vector<double>& positions,
                                  double a) {
  if (positions.empty())
    throw std::invalid_argument("equivalent_position: empty positions");
  std::vector<double> scaled(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) scaled[i] = a * positions[i];
  return log_sum_exp(scaled);
}

/// Selection probabilities theta_k = e^{a x_k} / sum_i e^{a x_i},
/// order-matched to positions.
inline WeightVector selection_weights(const std::vector<double>& positions,
                                      double a) {
  if (positions.empty())
    throw std::invalid_argument("selection_weights: empty positions");
  const std::size_t n = positions.size();
  WeightVector w;
  w.weights.resize(n);
  double m = a * positions[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, a * positions[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w.weights[i] = std::exp(a * positions[i] - m);
    s += w.weights[i];
  }
  for (auto& x : w.weights) x /= s;
  return w;
}

/// One generation of the front at one instant.
struct FrontState {
  std::vector<double> positions;  // strictly decreasing
  double x_eq = 0.0;              // log sum e^{a * positions[j]}
  long generation = 0;
};

/// Per-step summary. parent_indices[k] is the parent (0-based index into the
/// previous generation) of the k-th rightmost child; empty when parent
/// recording is off.
struct StepRecord {
  long generation = 0;
  double x_eq = 0.0;
  double max = 0.0;
  double min = 0.0;
  double zeta = 0.0;  // x_eq(n) - a * x_eq(n-1)
  std::vector<std::size_t> parent_indices;
};

namespace detail {

// Categorical draw from cumulative weights (strictly increasing, last ~= 1).
inline std::size_t draw_categorical(const std::vector<double>& cum,
                                    RngStream& rng) {
  const double u = rng.uniform_co() * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  std::size_t idx = std::size_t(it - cum.begin());
  if (idx >= cum.size()) idx = cum.size() - 1;
  return idx;
}

}  // namespace detail

/// One forward step. New positions are old x_eq plus fresh top atoms; parents
/// are i.i.d. categorical draws from the *old* generation's weights.
inline std::pair<FrontState, StepRecord> step_front(const FrontState& state,
                                                    const ModelParams& params,
                                                    RngStream& rng,
                                                    bool record_parents = true) {
  params.validate();
  if (state.positions.size() != params.N)
    throw std::invalid_argument("step_front: state size != N");

  const TopAtoms atoms = sample_top_atoms(params.N, rng);

  FrontState next;
  next.generation = state.generation + 1;
  next.positions.resize(params.N);
  for (std::size_t k = 0; k < params.N; ++k)
    next.positions[k] = state.x_eq + atoms.atoms[k];
  next.x_eq = equivalent_position(next.positions, params.a);

  StepRecord rec;
  rec.generation = next.generation;
  rec.x_eq = next.x_eq;
  rec.max = next.positions.front();
  rec.min = next.positions.back();
  rec.zeta = next.x_eq - params.a * state.x_eq;

  if (record_parents) {
    const WeightVector w = selection_weights(state.positions, params.a);
    std::vector<double> cum(params.N);
    double acc = 0.0;
    for (std::size_t i = 0; i < params.N; ++i) {
      acc += w.weights[i];
      cum[i] = acc;
    }
    rec.parent_indices.resize(params.N);
    for (std::size_t k = 0; k < params.N; ++k)
      rec.parent_indices[k] = detail::draw_categorical(cum, rng);
  }
  return {std::move(next), std::move(rec)};
}

/// One draw of zeta = log sum_j e^{a p_j}, p the top N atoms. Equal in law to
/// a step_front increment. a = 0 gives log N exactly.
inline double sample_zeta(const ModelParams& params, RngStream& rng) {
  params.validate();
  const TopAtoms atoms = sample_top_atoms(params.N, rng);
  std::vector<double> scaled(params.N);
  for (std::size_t k = 0; k < params.N; ++k) scaled[k] = params.a * atoms.atoms[k];
  return log_sum_exp(scaled);
}

/// Initial front from arbitrary positions: sorted decreasing, exact ties
/// perturbed by k * 1e-12 to keep the strict-order representation.
inline FrontState make_initial_front(const ModelParams& params,
                                     std::vector<double> init) {
  params.validate();
  if (init.size() != params.N)
    throw std::invalid_argument("make_initial_front: init size != N");
  for (double x : init)
    if (!std::isfinite(x))
      throw std::invalid_argument("make_initial_front: non-finite init");
  std::sort(init.begin(), init.end(), std::greater<double>());
  for (std::size_t k = 1; k < init.size(); ++k)
    if (init[k] >= init[k - 1]) init[k] = init[k - 1] - double(k) * 1e-12;
  FrontState s;
  s.positions = std::move(init);
  s.x_eq = equivalent_position(s.positions, params.a);
  s.generation = 0;
  return s;
}

/// Trajectory of n_steps forward steps. The x_eq sequence satisfies the
/// perpetuity recursion x_eq(n) = a x_eq(n-1) + zeta_n by construction.
inline std::vector<StepRecord> simulate_front(const ModelParams& params,
                                              const std::vector<double>& init,
                                              std::size_t n_steps,
                                              RngStream& rng,
                                              bool record_parents = false) {
  if (n_steps == 0)
    throw std::invalid_argument("simulate_front: n_steps must be >= 1");
  FrontState state = make_initial_front(params, init);
  std::vector<StepRecord> out;
  out.reserve(n_steps);
  for (std::size_t i = 0; i < n_steps; ++i) {
    auto [next, rec] = step_front(state, params, rng, record_parents);
    out.push_back(std::move(rec));
    state = std::move(next);
  }
  return out;
}

/// Stationary extremal statistics of one replica: simulate burn_in + 1 steps
/// from all-zero init and return (M, m, x_eq_prev) of the final step.
/// Fast path used by the front experiments; avoids storing trajectories.
struct FrontExtremes {
  double max = 0.0;
  double min = 0.0;
  double x_eq_prev = 0.0;
};

inline FrontExtremes simulate_front_extremes(const ModelParams& params,
                                             std::size_t burn_in,
                                             RngStream& rng) {
  params.validate();
  const double a = params.a;
  const auto N = Eigen::Index(params.N);
  // x_eq(0) for all particles at 0 is log N
  double x_eq = std::log(double(params.N));
  ArrayXd u(N), gam(N);
  double p1 = 0.0, pN = 0.0, x_prev = x_eq;
  for (std::size_t step = 0; step <= burn_in; ++step) {
    fill_uniform_oc(u, rng);
    // cumulative sums of exponentials
    double cum = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) {
      cum -= std::log(u[k]);
      gam[k] = cum;
    }
    // zeta = log sum_k Gamma_k^{-a}, max-shifted (largest term is k = 0)
    const ArrayXd lg = gam.log();
    const double shift = -a * lg[0];
    const double sum = (-a * lg - shift).exp().sum();
    const double zeta = shift + std::log(sum);
    p1 = -lg[0];
    pN = -lg[N - 1];
    x_prev = x_eq;
    x_eq = a * x_eq + zeta;
  }
  return {x_prev + p1, x_prev + pN, x_prev};
}

}  // namespace bfl
