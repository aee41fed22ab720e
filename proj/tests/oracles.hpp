#pragma once

// Brute-force references used by the tests. They re-derive latencies and
// costs from scratch instead of calling the library so that they stay
// independent of the closed forms they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace nettax::oracle {

inline double mm1(double c, double f) {
  return f < c ? 1.0 / (c - f) : std::numeric_limits<double>::infinity();
}

inline double cost_of_split(double c1, double c2, double f1, double f2) {
  const double a = f1 == 0.0 ? 0.0 : f1 * mm1(c1, f1);
  const double b = f2 == 0.0 ? 0.0 : f2 * mm1(c2, f2);
  return a + b;
}

/// Lowest total cost over f1 in [max(0, D - c2 + margin), min(D, c1 - margin)]
/// sampled at `step`, endpoints included.
inline double grid_min_cost(double c1, double c2, double demand, double step,
                            double margin = 1e-6) {
  const double lo = std::max(0.0, demand - c2 + margin);
  const double hi = std::min(demand, c1 - margin);
  double best = std::numeric_limits<double>::infinity();
  if (hi < lo)
    return best;
  const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step));
  for (std::int64_t k = 0; k <= n + 1; ++k) {
    const double f1 = std::min(hi, lo + k * step);
    best = std::min(best, cost_of_split(c1, c2, f1, demand - f1));
  }
  return best;
}

struct GoldenResult {
  double f1;
  double cost;
};

/// Golden-section minimization of the (convex) total cost in f1.
inline GoldenResult golden_min_cost(double c1, double c2, double demand) {
  double a = std::max(0.0, demand - c2);
  double b = std::min(demand, c1);
  // stay strictly inside the finite region
  const double shrink = 1e-12 * std::max(1.0, b - a);
  if (demand - a >= c2)
    a += shrink;
  if (b >= c1)
    b -= shrink;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double x) { return cost_of_split(c1, c2, x, demand - x); };
  for (int it = 0; it < 300; ++it) {
    const double x1 = b - g * (b - a);
    const double x2 = a + g * (b - a);
    if (f(x1) < f(x2))
      b = x2;
    else
      a = x1;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Aggregate flow on network 1 at which latencies equalize (or the boundary
/// where one link is unused), by scanning a uniform grid for the smallest
/// violation of the untaxed Wardrop condition.
inline double grid_no_tax_equilibrium(double c1, double c2, double demand, double step) {
  double best_f1 = 0.0;
  double best_v = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::int64_t>(std::floor(demand / step));
  for (std::int64_t k = 0; k <= n + 1; ++k) {
    const double f1 = std::min(demand, k * step);
    const double l1 = mm1(c1, f1);
    const double l2 = mm1(c2, demand - f1);
    double v = 0.0;
    if (f1 > 0.0)
      v = std::max(v, l1 - l2);
    if (demand - f1 > 0.0)
      v = std::max(v, l2 - l1);
    if (std::isnan(v))
      v = std::numeric_limits<double>::infinity();
    if (v < best_v) {
      best_v = v;
      best_f1 = f1;
    }
  }
  return best_f1;
}

struct WardropGridPoint {
  double f1a = 0.0;
  double f1b = 0.0;
  double violation = std::numeric_limits<double>::infinity();
  double aggregate1() const { return f1a + f1b; }
};

/// Exhaustive scan of the lattice (f1A, f1B) = (i, j) * step over
/// [0, d_A] x [0, d_B], scored by the largest Wardrop-condition violation
/// among used (network, class) pairs. Class demands must be whole multiples
/// of `step`. Latencies depend only on i + j, so they are tabulated once.
inline WardropGridPoint grid_wardrop(double c1, double c2, double d_a, double d_b,
                                     double alpha_a, double alpha_b, double tau1,
                                     double tau2, double step) {
  const auto na = static_cast<std::int64_t>(std::llround(d_a / step));
  const auto nb = static_cast<std::int64_t>(std::llround(d_b / step));
  const auto n = na + nb;
  std::vector<double> l1(n + 1), l2(n + 1);
  for (std::int64_t k = 0; k <= n; ++k) {
    l1[k] = mm1(c1, k * step);
    l2[k] = mm1(c2, (n - k) * step);
  }
  const double ta = alpha_a * (tau2 - tau1);
  const double tb = alpha_b * (tau2 - tau1);
  // Class i on network 1 violates by (l1 - l2) - t_i, on network 2 by the
  // negation; a saturated used link is an infinite violation.
  auto score = [](double gap, double t, bool on1, bool on2, bool inf1, bool inf2) {
    double v = 0.0;
    if (on1)
      v = std::max(v, inf1 ? std::numeric_limits<double>::infinity() : gap - t);
    if (on2)
      v = std::max(v, inf2 ? std::numeric_limits<double>::infinity() : t - gap);
    return v;
  };
  WardropGridPoint best;
  for (std::int64_t i = 0; i <= na; ++i) {
    for (std::int64_t j = 0; j <= nb; ++j) {
      const std::int64_t k = i + j;
      const bool inf1 = std::isinf(l1[k]);
      const bool inf2 = std::isinf(l2[k]);
      const double gap = l1[k] - l2[k];  // +-inf when one link saturates
      const double v = std::max(score(gap, ta, i > 0, i < na, inf1, inf2),
                                score(gap, tb, j > 0, j < nb, inf1, inf2));
      if (v < best.violation) {
        best.violation = v;
        best.f1a = i * step;
        best.f1b = j * step;
      }
    }
  }
  return best;
}

} // namespace nettax::oracle
