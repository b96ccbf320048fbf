#pragma once

// Closed-form front statistics and numerical tools: digamma, the integral
// I(t), J_N'(0), the Laplace transform of the front increment, exact E(xi),
// front-position limits, coalescent timescales, power-law fitting and a
// two-sample Kolmogorov-Smirnov test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfl {

inline constexpr double kEulerGamma = 0.577215664901532860606512;

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  std::size_t max_subdivisions = 4000;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
  }
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// 15-point Gauss-Kronrod nodes/weights on [-1,1] (7-point Gauss embedded).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GKResult {
  double value;
  double error;
};

template <class F>
GKResult gk15(const F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGK15Nodes[i]);
    fv[14 - i] = f(c + h * kGK15Nodes[i]);
  }
  fv[7] = f(c);
  double kron = 0.0;
  for (int i = 0; i < 7; ++i) kron += kGK15WeightsK[i] * (fv[i] + fv[14 - i]);
  kron += kGK15WeightsK[7] * fv[7];
  double gauss = 0.0;
  for (int i = 0; i < 3; ++i)
    gauss += kGK15WeightsG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  gauss += kGK15WeightsG[3] * fv[7];
  return {h * kron, std::abs(h * (kron - gauss))};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [lo, hi].
template <class F>
double integrate(const F& f, double lo, double hi, const QuadratureSpec& spec) {
  spec.validate();
  if (!(hi > lo)) return 0.0;
  struct Segment {
    double lo, hi, value, error;
  };
  auto first = detail::gk15(f, lo, hi);
  std::vector<Segment> segs{{lo, hi, first.value, first.error}};
  std::size_t splits = 0;
  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].value;
      err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
      return total;
    if (++splits > spec.max_subdivisions)
      throw QuadratureError(
          "integrate: failed to converge after " +
          std::to_string(spec.max_subdivisions) + " subdivisions (error " +
          std::to_string(err) + ")");
    const Segment s = segs[worst];
    const double mid = 0.5 * (s.lo + s.hi);
    auto left = detail::gk15(f, s.lo, mid);
    auto right = detail::gk15(f, mid, s.hi);
    segs[worst] = {s.lo, mid, left.value, left.error};
    segs.push_back({mid, s.hi, right.value, right.error});
  }
}

/// Digamma psi(x) for x > 0 to ~1e-13: upward recurrence until x >= 12,
/// then the asymptotic series.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma: x must be > 0");
  double acc = 0.0;
  while (x < 12.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // ln x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - 1/(252x^6) + 1/(240x^8) - 1/(132x^10)
  double series = std::log(x) - 0.5 * inv;
  series -= inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 - inv2 / 132.0))));
  return acc + series;
}

/// I(t) = E(e^{-t e^{a E}}) = int_0^inf e^{-x - t e^{a x}} dx, for t >= 0 and
/// 0 < a < 1. Decreasing in t with I(0) = 1 and I(t) <= e^{-t}.
inline double compute_I(double t, double a,
                        const QuadratureSpec& spec = QuadratureSpec{}) {
  if (!(t >= 0.0)) throw std::invalid_argument("compute_I: t must be >= 0");
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("compute_I: a must be in (0,1)");
  if (t == 0.0) return 1.0;
  // integrand negligible once x + t e^{ax} > ~746
  double hi = 746.0;
  if (t >= 1e-300) hi = std::min(hi, std::max(0.0, std::log(746.0 / t) / a) + 40.0);
  if (hi <= 0.0) return 0.0;
  const auto f = [t, a](double x) { return std::exp(-x - t * std::exp(a * x)); };
  return integrate(f, 0.0, hi, spec);
}

namespace detail {

// (I(x/N)^N - e^{-x}), guarded by the small-x linearization
// I(t) = 1 - t/(1-a) + O(t^b): below x = 1e-6 the difference is
// ~ -a/(1-a) * x.
inline double i_pow_minus_exp(double x, std::size_t N, double a,
                              const QuadratureSpec& spec) {
  if (x < 1e-6) return -a / (1.0 - a) * x;
  const double i = compute_I(x / double(N), a, spec);
  const double ipow = std::exp(double(N) * std::log(i));
  return ipow - std::exp(-x);
}

}  // namespace detail

/// J_N'(0) = int_0^inf x^{-1} (I(x/N)^N - e^{-x}) dx. The x -> 0 singularity
/// is removable (limit -a/(1-a)); the interval is split at x = 1 and the tail
/// truncated where the integrand falls below 2 e^{-x}.
inline double compute_jn_prime0(
    std::size_t N, double a,
    const QuadratureSpec& spec = QuadratureSpec{1e-9, 1e-9, 4000}) {
  if (N < 1) throw std::invalid_argument("compute_jn_prime0: N must be >= 1");
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("compute_jn_prime0: a must be in (0,1)");
  QuadratureSpec inner = spec;
  inner.abs_tol = std::min(spec.abs_tol, 1e-14);
  inner.rel_tol = std::min(spec.rel_tol, 1e-13);
  const auto f = [&](double x) {
    if (x <= 0.0) return -a / (1.0 - a);
    if (x < 1e-6) return -a / (1.0 - a);
    return detail::i_pow_minus_exp(x, N, a, inner) / x;
  };
  const double head = integrate(f, 0.0, 1.0, spec);
  const double tail = integrate(f, 1.0, 50.0, spec);
  return head + tail;
}

/// Exact finite-N mean of the front increment xi:
/// E(xi) = log N - a psi(N+1) - J_N'(0).
inline double analytic_mean_xi(
    std::size_t N, double a,
    const QuadratureSpec& spec = QuadratureSpec{1e-9, 1e-9, 4000}) {
  if (N < 1) throw std::invalid_argument("analytic_mean_xi: N must be >= 1");
  return std::log(double(N)) - a * digamma(double(N) + 1.0) -
         compute_jn_prime0(N, a, spec);
}

/// Large-N form (1-a) log N - log(1-a).
inline double asymptotic_mean_xi(std::size_t N, double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("asymptotic_mean_xi: a must be in (0,1)");
  return (1.0 - a) * std::log(double(N)) - std::log(1.0 - a);
}

/// Laplace transform Lambda(lambda) = E(e^{-lambda xi}) =
/// J_N(lambda) Gamma(N + a lambda + 1) / (N^lambda Gamma(N+1)), with
/// J_N(lambda) = 1 + Gamma(lambda)^{-1} int x^{lambda-1}(I(x/N)^N - e^{-x}) dx.
/// Accepts lambda > -1/2 so that the derivative at 0 can be taken centrally.
inline double laplace_xi(
    double lambda, std::size_t N, double a,
    const QuadratureSpec& spec = QuadratureSpec{1e-9, 1e-9, 4000}) {
  if (N < 1) throw std::invalid_argument("laplace_xi: N must be >= 1");
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("laplace_xi: a must be in (0,1)");
  if (!(lambda > -0.5))
    throw std::invalid_argument("laplace_xi: lambda must be > -1/2");
  if (lambda == 0.0) return 1.0;
  QuadratureSpec inner = spec;
  inner.abs_tol = std::min(spec.abs_tol, 1e-14);
  inner.rel_tol = std::min(spec.rel_tol, 1e-13);
  const auto f = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double diff = x < 1e-6 ? -a / (1.0 - a) * x
                                 : detail::i_pow_minus_exp(x, N, a, inner);
    return std::pow(x, lambda - 1.0) * diff;
  };
  const double integral =
      integrate(f, 0.0, 1.0, spec) + integrate(f, 1.0, 50.0, spec);
  const double jn = 1.0 + integral / std::tgamma(lambda);
  const double log_ratio = std::lgamma(double(N) + a * lambda + 1.0) -
                           std::lgamma(double(N) + 1.0) -
                           lambda * std::log(double(N));
  return jn * std::exp(log_ratio);
}

/// Large-N limits of the front extremes for a in (0,1):
/// (lim E(M) - log N, lim E(m)) = (gamma - log(1-a)/(1-a), -log(1-a)/(1-a)).
inline std::pair<double, double> front_position_limits(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("front_position_limits: a must be in (0,1)");
  const double shared = -std::log(1.0 - a) / (1.0 - a);
  return {kEulerGamma + shared, shared};
}

/// Coalescent timescale of the ancestral process: N for a < 1/2, N/log N at
/// a = 1/2, N^{(1-a)/a} for 1/2 < a < 1, log N at a = 1, and 1 for a > 1.
inline double theoretical_timescale(std::size_t N, double a) {
  if (N < 2) throw std::invalid_argument("theoretical_timescale: N must be >= 2");
  if (!(a > 0.0)) throw std::invalid_argument("theoretical_timescale: a > 0");
  const double n = double(N);
  if (a < 0.5) return n;
  if (a == 0.5) return n / std::log(n);
  if (a < 1.0) return std::pow(n, (1.0 - a) / a);
  if (a == 1.0) return std::log(n);
  return 1.0;
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_se = 0.0;
};

/// Least squares of log(value) on log(N); slope is the scaling exponent.
inline FitResult fit_power_law(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_power_law: need >= 3 points");
  std::vector<double> lx, ly;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0))
      throw std::invalid_argument("fit_power_law: values must be positive");
    lx.push_back(std::log(n));
    ly.push_back(std::log(v));
  }
  for (std::size_t i = 1; i < lx.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (lx[i] == lx[j])
        throw std::invalid_argument("fit_power_law: N values must be distinct");
  const double n = double(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  FitResult fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += e * e;
    ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  fit.residual_se =
      lx.size() > 2 ? std::sqrt(ss_res / (n - 2.0)) : 0.0;
  return fit;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.
inline KsResult ks_two_sample(std::vector<double> sample_a,
                              std::vector<double> sample_b) {
  if (sample_a.empty() || sample_b.empty())
    throw std::invalid_argument("ks_two_sample: samples must be nonempty");
  std::sort(sample_a.begin(), sample_a.end());
  std::sort(sample_b.begin(), sample_b.end());
  const double na = double(sample_a.size()), nb = double(sample_b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sample_a.size() && j < sample_b.size()) {
    const double x = std::min(sample_a[i], sample_b[j]);
    while (i < sample_a.size() && sample_a[i] <= x) ++i;
    while (j < sample_b.size() && sample_b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  KsResult res;
  res.statistic = d;
  const double ne = na * nb / (na + nb);
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lam < 1e-3) {
    res.p_value = 1.0;
    return res;
  }
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * double(k) * double(k) * lam * lam);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  res.p_value = std::clamp(p, 0.0, 1.0);
  return res;
}

}  // namespace bfl
