#pragma once

// Seeded random primitives: splittable counter-derived streams, exponential
// and Gamma variates, the top-N atoms of the e^{-x}dx Poisson point process,
// and the auxiliary variable Z_N.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bfl {

namespace detail {

// SplitMix64, used only to expand (master_seed, stream_index) into state.
struct SplitMix64 {
  std::uint64_t x;
  explicit SplitMix64(std::uint64_t seed) : x(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

}  // namespace detail

/// Deterministic per-replica random stream (xoshiro256++ core).
///
/// Identical (master_seed, stream_index) pairs yield identical sequences
/// regardless of platform thread scheduling; distinct stream indices give
/// statistically independent streams. Single-owner: one stream per thread.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_(master_seed), stream_index_(stream_index) {
    detail::SplitMix64 sm(master_seed ^
                          (0x9e3779b97f4a7c15ULL * (stream_index + 1)));
    for (auto& w : s_) w = sm.next();
    // all-zero state is invalid for xoshiro
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform_co() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; never returns 0, so -log is always finite.
  double uniform_oc() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard exponential via inverse CDF.
  double exponential() { return -std::log(uniform_oc()); }

  /// Standard normal (Box-Muller, pairs cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(2.0 * -std::log(uniform_oc()));
    const double t = 6.283185307179586476925286766559 * uniform_co();
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t s_[4];
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Inverse-CDF map from a uniform u in (0,1] to a mean-1 exponential.
inline double exponential_from_uniform(double u) { return -std::log(u); }

/// n i.i.d. mean-1 exponential variates.
inline std::vector<double> sample_exponentials(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_exponentials: n must be >= 1");
  std::vector<double> out(n);
  for (auto& v : out) v = rng.exponential();
  return out;
}

/// The N rightmost atoms of a Poisson point process with intensity e^{-x}dx,
/// in strictly decreasing order: p_k = -log(Gamma_k) with Gamma_k the k-th
/// cumulative sum of i.i.d. mean-1 exponentials.
struct TopAtoms {
  std::vector<double> atoms;  // strictly decreasing
};

inline TopAtoms sample_top_atoms(std::size_t N, RngStream& rng) {
  if (N == 0) throw std::invalid_argument("sample_top_atoms: N must be >= 1");
  TopAtoms out;
  out.atoms.resize(N);
  double cum = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    cum += rng.exponential();
    out.atoms[k] = -std::log(cum);
  }
  return out;
}

/// Gamma(shape, 1) variate. Sum of exponentials for small integer shapes,
/// Marsaglia-Tsang otherwise.
inline double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0)) throw std::invalid_argument("sample_gamma: shape must be > 0");
  const bool small_integer =
      shape <= 65.0 && shape == std::floor(shape);
  if (small_integer) {
    double sum = 0.0;
    for (long i = 0; i < long(shape); ++i) sum += rng.exponential();
    return sum;
  }
  if (shape < 1.0) {
    // boost via Gamma(shape+1) * U^{1/shape}
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform_oc(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_oc();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Z_N = -log(G), G ~ Gamma(N+1, 1); density (N!)^{-1} e^{-(N+1)x - e^{-x}}.
inline double sample_zN(std::size_t N, RngStream& rng) {
  if (N == 0) throw std::invalid_argument("sample_zN: N must be >= 1");
  return -std::log(sample_gamma(double(N) + 1.0, rng));
}

}  // namespace bfl
