#pragma once

// Backward-in-time genealogy through the Cannings representation: stationary
// weight vectors, parent maps, the ancestral partition process, pair
// coalescence times, and the one-step pair-merge probability c_N.
//
// The backward weight sequence is i.i.d. (bi-infinite construction), so the
// genealogy is simulated purely from stationary weight draws, never from a
// realized front.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bfl/model.hpp"
#include "bfl/rng.hpp"
#include "bfl/vecmath.hpp"

namespace bfl {

/// Parent index (0-based, into 0..N-1) for each lineage.
struct ParentMap {
  std::vector<std::size_t> parents;
};

/// Ancestral partition of a sample. block_of maps each sampled individual to
/// a block id (contiguous from 0); each block carries the index of its
/// current ancestor in the full population.
struct Partition {
  std::vector<std::size_t> block_of;          // per sampled individual
  std::vector<std::size_t> ancestor_of_block;  // per block id

  static Partition singletons(std::size_t n_sample) {
    Partition p;
    p.block_of.resize(n_sample);
    p.ancestor_of_block.resize(n_sample);
    for (std::size_t i = 0; i < n_sample; ++i) {
      p.block_of[i] = i;
      p.ancestor_of_block[i] = i;
    }
    return p;
  }

  static Partition singletons_with_ancestors(
      const std::vector<std::size_t>& ancestors) {
    Partition p;
    p.block_of.resize(ancestors.size());
    p.ancestor_of_block = ancestors;
    for (std::size_t i = 0; i < ancestors.size(); ++i) p.block_of[i] = i;
    return p;
  }

  std::size_t block_count() const { return ancestor_of_block.size(); }
};

/// One draw of the stationary Cannings weight law:
/// { e^{a E_i} / sum_k e^{a E_k} } with E_j i.i.d. standard exponentials.
/// a = 0 gives exactly (1/N, ..., 1/N).
inline WeightVector sample_stationary_weights(const ModelParams& params,
                                              RngStream& rng) {
  params.validate();
  const std::size_t N = params.N;
  WeightVector w;
  w.weights.resize(N);
  if (params.a == 0.0) {
    std::fill(w.weights.begin(), w.weights.end(), 1.0 / double(N));
    return w;
  }
  // e^{aE} = U^{-a} for U uniform on (0,1]
  ArrayXd u{Eigen::Index(N)};
  fill_uniform_oc(u, rng);
  const ArrayXd e = (-params.a * u.log()).exp();
  const double s = e.sum();
  for (std::size_t i = 0; i < N; ++i) w.weights[i] = e[Eigen::Index(i)] / s;
  return w;
}

/// i.i.d. categorical parent draws from a fixed weight vector.
inline ParentMap sample_parent_map(const WeightVector& weights,
                                   std::size_t n_lineages, RngStream& rng) {
  if (n_lineages == 0)
    throw std::invalid_argument("sample_parent_map: n_lineages must be >= 1");
  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cum[i] = acc;
  }
  ParentMap pm;
  pm.parents.resize(n_lineages);
  for (auto& p : pm.parents) {
    const double u = rng.uniform_co() * acc;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    p = std::min(std::size_t(it - cum.begin()), weights.size() - 1);
  }
  return pm;
}

/// Merge blocks whose ancestors share a parent. parent_of_ancestor[b] is the
/// parent index of block b's current ancestor (one entry per block, in block
/// order). Block ids are relabeled contiguously by first appearance.
inline Partition coalesce_step(const Partition& partition,
                               const ParentMap& parent_of_ancestor,
                               std::size_t population_size) {
  if (parent_of_ancestor.parents.size() != partition.block_count())
    throw std::invalid_argument("coalesce_step: one parent per block required");
  for (std::size_t p : parent_of_ancestor.parents)
    if (p >= population_size)
      throw std::invalid_argument("coalesce_step: ancestor index out of range");

  // map old block -> new block via shared parent
  std::vector<std::size_t> new_block_of_old(partition.block_count());
  std::vector<std::size_t> new_ancestors;
  std::vector<std::pair<std::size_t, std::size_t>> seen;  // (parent, new block)
  for (std::size_t b = 0; b < partition.block_count(); ++b) {
    const std::size_t parent = parent_of_ancestor.parents[b];
    std::size_t nb = new_ancestors.size();
    for (const auto& [p, id] : seen)
      if (p == parent) {
        nb = id;
        break;
      }
    if (nb == new_ancestors.size()) {
      seen.emplace_back(parent, nb);
      new_ancestors.push_back(parent);
    }
    new_block_of_old[b] = nb;
  }

  Partition next;
  next.block_of.resize(partition.block_of.size());
  for (std::size_t i = 0; i < partition.block_of.size(); ++i)
    next.block_of[i] = new_block_of_old[partition.block_of[i]];
  next.ancestor_of_block = std::move(new_ancestors);
  return next;
}

/// Ancestral partition process of the n_sample rightmost individuals at time
/// 0, run for `horizon` backward generations. Each generation draws fresh
/// stationary weights shared by all lineages. Returns horizon + 1 partitions
/// (index 0 is the initial singleton partition); once a single block remains
/// the partition is carried forward unchanged.
inline std::vector<Partition> simulate_ancestral_process(
    const ModelParams& params, std::size_t n_sample, std::size_t horizon,
    RngStream& rng,
    const std::vector<std::size_t>* initial_ancestors = nullptr) {
  params.validate();
  if (n_sample < 1 || n_sample > params.N)
    throw std::invalid_argument(
        "simulate_ancestral_process: need 1 <= n_sample <= N");
  Partition part = initial_ancestors
                       ? Partition::singletons_with_ancestors(*initial_ancestors)
                       : Partition::singletons(n_sample);
  std::vector<Partition> out;
  out.reserve(horizon + 1);
  out.push_back(part);
  for (std::size_t g = 0; g < horizon; ++g) {
    if (part.block_count() > 1) {
      const WeightVector w = sample_stationary_weights(params, rng);
      const ParentMap pm = sample_parent_map(w, part.block_count(), rng);
      part = coalesce_step(part, pm, params.N);
    }
    out.push_back(part);
  }
  return out;
}

/// First backward generation at which the sample reaches a single block,
/// or 0 if never within the recorded horizon.
inline std::size_t absorption_time(const std::vector<Partition>& path) {
  for (std::size_t g = 0; g < path.size(); ++g)
    if (path[g].block_count() == 1) return g;
  return 0;
}

namespace detail {

// Sum of squared weights without normalizing: S = sum e^{2aE} / (sum e^{aE})^2.
inline double squared_weight_sum(const ModelParams& params, RngStream& rng,
                                 ArrayXd& scratch) {
  if (params.a == 0.0) return 1.0 / double(params.N);
  fill_uniform_oc(scratch, rng);
  const ArrayXd w = (-params.a * scratch.log()).exp();
  const double s1 = w.sum();
  const double s2 = (w * w).sum();
  return s2 / (s1 * s1);
}

}  // namespace detail

/// Backward generations until two lineages merge, simulated as the Bernoulli
/// mixture: conditional on a generation's weights both free lineages merge
/// with probability sum_i theta_i^2. weight_probability supplies one such
/// merge probability per generation (fresh i.i.d. draw each call).
inline std::uint64_t first_merge_time(
    const std::function<double()>& merge_probability, RngStream& rng,
    std::uint64_t max_generations = 100000000ULL) {
  for (std::uint64_t t = 1; t <= max_generations; ++t) {
    const double s = merge_probability();
    if (rng.uniform_co() < s) return t;
  }
  throw std::runtime_error("first_merge_time: no merge within generation cap");
}

inline std::uint64_t pair_coalescence_time(const ModelParams& params,
                                           RngStream& rng) {
  params.validate();
  if (params.N < 2)
    throw std::invalid_argument("pair_coalescence_time: N must be >= 2");
  ArrayXd scratch(Eigen::Index(params.N));
  return first_merge_time(
      [&] { return detail::squared_weight_sum(params, rng, scratch); }, rng);
}

/// Many pair coalescence times sampled against one common stationary
/// environment: the backward sequence of merge probabilities S_n is drawn
/// once (stream index base) and every replica r walks it with its own
/// Bernoulli stream (base + 1 + r). Each time is exactly geometric(c_N) in
/// law; replicas share the environment, as pairs in one population do.
inline std::vector<std::uint64_t> pair_coalescence_times_common_env(
    const ModelParams& params, std::size_t replicas, std::uint64_t master_seed,
    std::uint64_t stream_base = 0) {
  params.validate();
  if (params.N < 2)
    throw std::invalid_argument(
        "pair_coalescence_times_common_env: N must be >= 2");
  RngStream env(master_seed, stream_base);
  ArrayXd scratch(Eigen::Index(params.N));
  std::vector<double> s_cache;
  const auto merge_prob = [&](std::size_t n) {
    while (s_cache.size() <= n)
      s_cache.push_back(detail::squared_weight_sum(params, env, scratch));
    return s_cache[n];
  };
  std::vector<std::uint64_t> out(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    RngStream walk(master_seed, stream_base + 1 + r);
    std::uint64_t t = 1;
    while (walk.uniform_co() >= merge_prob(t - 1)) {
      ++t;
      if (t > 100000000ULL)
        throw std::runtime_error("pair_coalescence_times_common_env: cap hit");
    }
    out[r] = t;
  }
  return out;
}

/// Monte Carlo estimate of c_N = E[sum_i theta_i^2] with its standard error.
inline std::pair<double, double> estimate_cN(const ModelParams& params,
                                             std::size_t replicas,
                                             RngStream& rng) {
  params.validate();
  if (replicas < 2)
    throw std::invalid_argument("estimate_cN: replicas must be >= 2");
  ArrayXd scratch(Eigen::Index(params.N));
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t r = 0; r < replicas; ++r) {
    const double s = detail::squared_weight_sum(params, rng, scratch);
    sum += s;
    sumsq += s * s;
  }
  const double mean = sum / double(replicas);
  const double var =
      std::max(0.0, (sumsq - double(replicas) * mean * mean) /
                        double(replicas - 1));
  return {mean, std::sqrt(var / double(replicas))};
}

}  // namespace bfl
