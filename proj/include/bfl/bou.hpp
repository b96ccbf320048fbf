#pragma once

// Event-driven branching Ornstein-Uhlenbeck process with N-rightmost
// selection. Particles follow exact OU transitions between binary branching
// events (total rate N * branch_rate); at each event a uniformly chosen
// particle duplicates in place and the leftmost of the N+1 particles is
// removed. A pruned genealogy buffer supports MRCA-age queries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bfl/rng.hpp"
#include "bfl/vecmath.hpp"

namespace bfl {

struct OUParams {
  double mu = 0.0;          // pulling strength
  double sigma = 1.0;       // diffusion coefficient
  double branch_rate = 1.0;  // per-particle branching rate

  void validate() const {
    if (!(mu >= 0.0) || !(sigma > 0.0) || !(branch_rate > 0.0))
      throw std::invalid_argument("OUParams: need mu >= 0, sigma > 0, rate > 0");
  }
};

/// Exact OU transition over time delta:
/// x e^{-mu delta} + Normal(0, sigma^2 (1 - e^{-2 mu delta}) / (2 mu)),
/// degenerating to Brownian variance sigma^2 delta at mu = 0.
inline double ou_transition_mean(double x, const OUParams& p, double delta) {
  return x * std::exp(-p.mu * delta);
}

inline double ou_transition_variance(const OUParams& p, double delta) {
  if (p.mu == 0.0) return p.sigma * p.sigma * delta;
  return p.sigma * p.sigma * (-std::expm1(-2.0 * p.mu * delta)) / (2.0 * p.mu);
}

inline double ou_transition(double x, const OUParams& params, double delta,
                            RngStream& rng) {
  params.validate();
  if (!(delta >= 0.0)) throw std::invalid_argument("ou_transition: delta >= 0");
  if (delta == 0.0) return x;
  return ou_transition_mean(x, params, delta) +
         std::sqrt(ou_transition_variance(params, delta)) * rng.normal();
}

/// Pruned forest of birth events: each living particle points at the node
/// created when its lineage last split; nodes hold their split time and a
/// parent link. Nodes with no living descendants are reclaimed.
class GenealogyBuffer {
 public:
  static constexpr int kNoNode = -1;

  explicit GenealogyBuffer(std::size_t n_particles, double time0 = 0.0) {
    particle_node_.resize(n_particles);
    for (std::size_t i = 0; i < n_particles; ++i)
      particle_node_[i] = new_node(time0, kNoNode);
  }

  std::size_t population() const { return particle_node_.size(); }

  /// Particle i duplicates at `time`; the copy replaces particle `slot`
  /// (the removed leftmost). If slot == i the clone itself was the leftmost
  /// and the event leaves the population unchanged apart from a unary node.
  void branch(std::size_t i, std::size_t slot, double time) {
    check(i);
    check(slot);
    const int node = new_node(time, particle_node_[i]);
    // the new node takes over i's reference to its old chain
    nodes_[node].refcount = 2;
    particle_node_[i] = node;
    if (slot != i) {
      release(particle_node_[slot]);
      particle_node_[slot] = node;
    } else {
      --nodes_[node].refcount;
    }
  }

  /// Age (now - split time) of the most recent common ancestor of particles
  /// i and j, or +inf when their retained histories never merge (censored).
  double mrca_age(std::size_t i, std::size_t j, double now) const {
    check(i);
    check(j);
    if (i == j) return 0.0;
    int u = particle_node_[i];
    int v = particle_node_[j];
    // node times increase toward the leaves; walk the younger one up
    while (u != v) {
      if (u == kNoNode || v == kNoNode)
        return std::numeric_limits<double>::infinity();
      if (nodes_[u].time >= nodes_[v].time)
        u = nodes_[u].parent;
      else
        v = nodes_[v].parent;
    }
    if (u == kNoNode) return std::numeric_limits<double>::infinity();
    return now - nodes_[u].time;
  }

  std::size_t live_node_count() const {
    return nodes_.size() - free_.size();
  }

  /// Splice out interior nodes with a single referrer. Such a node lies on
  /// exactly one lineage, so it can never be the answer to an MRCA query;
  /// removing it keeps the buffer at O(population) nodes. Call periodically.
  void compact() {
    const auto skip = [&](int u) {
      while (u != kNoNode && nodes_[u].refcount < 2) u = nodes_[u].parent;
      return u;
    };
    std::vector<char> relinked(nodes_.size(), 0);
    std::vector<char> kept(nodes_.size(), 0);
    for (auto& pn : particle_node_) {
      pn = skip(pn);
      int k = pn;
      while (k != kNoNode && !relinked[k]) {
        relinked[k] = 1;
        kept[k] = 1;
        nodes_[k].parent = skip(nodes_[k].parent);
        k = nodes_[k].parent;
      }
    }
    free_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!kept[i]) free_.push_back(int(i));
    // refcounts are preserved by splicing: every removed node forwards its
    // single reference to the node it pointed at
  }

 private:
  struct Node {
    double time = 0.0;
    int parent = kNoNode;
    int refcount = 0;
  };

  void check(std::size_t i) const {
    if (i >= particle_node_.size())
      throw std::invalid_argument("GenealogyBuffer: no such living particle");
  }

  int new_node(double time, int parent) {
    int id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
    } else {
      id = int(nodes_.size());
      nodes_.emplace_back();
    }
    nodes_[id] = {time, parent, 1};
    return id;
  }

  void release(int node) {
    while (node != kNoNode && --nodes_[node].refcount == 0) {
      const int parent = nodes_[node].parent;
      free_.push_back(node);
      node = parent;
    }
  }

  std::vector<int> particle_node_;
  std::vector<Node> nodes_;
  std::vector<int> free_;
};

struct BOUConfig {
  std::size_t N = 2;
  double gamma_pull = 1.0;  // mu_N = gamma_pull / (log N)^2
  double horizon = 0.0;     // simulated time; <= 0 picks 100 * N
  std::size_t pair_samples = 4096;

  void validate() const {
    if (N < 2) throw std::invalid_argument("BOUConfig: N must be >= 2");
    if (!(gamma_pull > 0.0))
      throw std::invalid_argument("BOUConfig: gamma_pull must be > 0");
  }

  double resolved_horizon() const {
    return horizon > 0.0 ? horizon : 100.0 * double(N);
  }

  double mu() const {
    const double l = std::log(double(N));
    return gamma_pull / (l * l);
  }
};

struct BouResult {
  double avg_mrca_age = 0.0;
  double standard_error = 0.0;
  double censored_fraction = 0.0;
  bool horizon_warning = false;
};

/// Full run: exact-transition event-driven simulation, then average MRCA age
/// over pair_samples uniform ordered pairs, sampled at 8 checkpoints spread
/// over the last 30% of the horizon (the rest is burn-in).
inline BouResult bou_run(const BOUConfig& config, RngStream& rng) {
  config.validate();
  const std::size_t N = config.N;
  OUParams ou{config.mu(), 1.0, 1.0};
  const double horizon = config.resolved_horizon();
  const double total_rate = double(N) * ou.branch_rate;

  ArrayXd pos = ArrayXd::Zero(Eigen::Index(N));
  ArrayXd noise{Eigen::Index(N)};
  GenealogyBuffer buffer(N, 0.0);

  constexpr std::size_t kCheckpoints = 8;
  std::vector<double> checkpoint_times(kCheckpoints);
  for (std::size_t c = 0; c < kCheckpoints; ++c)
    checkpoint_times[c] =
        horizon * (0.7 + 0.3 * double(c + 1) / double(kCheckpoints));
  std::size_t next_checkpoint = 0;

  std::vector<double> ages;
  ages.reserve(config.pair_samples);
  std::size_t censored = 0;
  const std::size_t pairs_per_checkpoint =
      (config.pair_samples + kCheckpoints - 1) / kCheckpoints;

  const auto sample_pairs = [&](double now) {
    for (std::size_t s = 0; s < pairs_per_checkpoint; ++s) {
      const std::size_t i = std::size_t(rng.uniform_co() * double(N));
      std::size_t j = std::size_t(rng.uniform_co() * double(N - 1));
      if (j >= i) ++j;
      const double age = buffer.mrca_age(i, j, now);
      if (std::isinf(age))
        ++censored;
      else
        ages.push_back(age);
    }
  };

  double t = 0.0;
  std::size_t events_since_compact = 0;
  while (t < horizon) {
    const double dt = rng.exponential() / total_rate;
    const double t_next = t + dt;
    while (next_checkpoint < kCheckpoints &&
           checkpoint_times[next_checkpoint] <= t_next) {
      sample_pairs(checkpoint_times[next_checkpoint]);
      ++next_checkpoint;
    }
    if (t_next >= horizon) break;
    t = t_next;
    const double decay = std::exp(-ou.mu * dt);
    const double sd = std::sqrt(ou_transition_variance(ou, dt));
    fill_normals(noise, rng);
    pos = pos * decay + sd * noise;
    const std::size_t who = std::size_t(rng.uniform_co() * double(N));
    Eigen::Index argmin = 0;
    pos.minCoeff(&argmin);
    const std::size_t slot = std::size_t(argmin);
    // the clone sits exactly at pos[who]; if `who` itself is leftmost the
    // clone ties it and is the one removed
    buffer.branch(who, slot, t);
    if (slot != who) pos[Eigen::Index(slot)] = pos[Eigen::Index(who)];
    if (++events_since_compact >= 4 * N) {
      buffer.compact();
      events_since_compact = 0;
    }
  }
  while (next_checkpoint < kCheckpoints) {
    sample_pairs(checkpoint_times[next_checkpoint]);
    ++next_checkpoint;
  }

  BouResult res;
  const std::size_t total = ages.size() + censored;
  res.censored_fraction = total ? double(censored) / double(total) : 0.0;
  if (!ages.empty()) {
    double sum = 0.0;
    for (double a : ages) sum += a;
    res.avg_mrca_age = sum / double(ages.size());
    double ss = 0.0;
    for (double a : ages) ss += (a - res.avg_mrca_age) * (a - res.avg_mrca_age);
    res.standard_error =
        ages.size() > 1 ? std::sqrt(ss / double(ages.size() - 1) /
                                    double(ages.size()))
                        : 0.0;
  }
  res.horizon_warning =
      res.censored_fraction > 0.05 || res.avg_mrca_age > 0.25 * horizon;
  return res;
}

}  // namespace bfl
