#pragma once

// Thin wrappers around Eigen's vectorized transcendentals for the hot loops.

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "bfl/rng.hpp"

namespace bfl {

using ArrayXd = Eigen::ArrayXd;

inline void fill_uniform_oc(ArrayXd& out, RngStream& rng) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.uniform_oc();
}

/// n standard normals via vectorized Box-Muller.
inline void fill_normals(ArrayXd& out, RngStream& rng) {
  const Eigen::Index n = out.size();
  const Eigen::Index m = (n + 1) / 2;
  ArrayXd u1(m), u2(m);
  fill_uniform_oc(u1, rng);
  fill_uniform_oc(u2, rng);
  const ArrayXd r = (-2.0 * u1.log()).sqrt();
  const ArrayXd t = 6.283185307179586476925286766559 * u2;
  const ArrayXd zc = r * t.cos();
  const ArrayXd zs = r * t.sin();
  out.head(m) = zc;
  out.tail(n - m) = zs.head(n - m);
}

}  // namespace bfl
