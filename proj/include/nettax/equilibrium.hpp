#pragma once

// Two-class Wardrop equilibrium under an arbitrary tax vector.
//
// A class-i user on network p perceives l_p(f_p) + alpha_i * tau_p. With
// h(f1) = l1(f1) - l2(D - f1) increasing in f1 and per-class thresholds
// t_i = alpha_i * (tau2 - tau1), class i fills network 1 while h < t_i and
// network 2 while h > t_i. The class with the larger threshold (class A when
// tau2 > tau1) is therefore the first to move onto network 1.

#include "nettax/analytics.hpp"

#include <array>
#include <string>

namespace nettax {

enum class NetClass { A = 0, B = 1 };

/// Solver could not validate any candidate support. Indicates a bug, since
/// an equilibrium always exists for admissible demand.
class NoEquilibriumFound : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Per-class flows on each network, f(p, i) with p in {1, 2}.
class ClassFlowSplit {
public:
  ClassFlowSplit() = default;
  ClassFlowSplit(double f1a, double f1b, double f2a, double f2b);

  double flow(int network, NetClass cls) const;
  double aggregate(int network) const;
  FlowAssignment aggregates() const { return {aggregate(1), aggregate(2)}; }
  double class_total(NetClass cls) const { return flow(1, cls) + flow(2, cls); }

  /// Non-negativity, per-class conservation against `demand` and strict
  /// capacity on each aggregate.
  bool consistent_with(const NetworkPair& net, const Demand& demand,
                       double tol = kDefaultTol) const;

private:
  // [network-1][class]
  std::array<std::array<double, 2>, 2> f_{};
};

/// How the reported equilibrium was located.
enum class SupportPattern {
  SecondOnTwoFirstSplit,  // e.g. B only on 2, A split
  SecondOnTwoFirstOnOne,  // B only on 2, A only on 1
  SecondSplitFirstOnOne,  // B split, A only on 1
  AllOnTwo,
  AllOnOne,
  Bisection,
};

std::string to_string(SupportPattern pattern);

struct EquilibriumReport {
  ClassFlowSplit split;
  std::array<double, 2> latency{};  // l_p at the aggregate flows
  // perceived cost [network-1][class]; defined for every pair, contract
  // bearing only where that class carries flow
  std::array<std::array<double, 2>, 2> perceived_cost{};
  double residual = 0.0;  // largest Wardrop-condition violation
  SupportPattern pattern = SupportPattern::Bisection;
};

/// Largest violation of the Wardrop condition over (p, i) with
/// f(p, i) > used_tol: max(0, cost_i(p) - cost_i(p')). Infinite when a used
/// network is saturated.
double wardrop_residual(const NetworkPair& net, const Sensitivities& sens,
                        const TaxVector& taxes, const ClassFlowSplit& split,
                        double used_tol = 0.0);

/// Closed-form support enumeration with a bisection fallback. The returned
/// report has residual <= tol, relaxed to max(tol, 1e-6) when the bisection
/// fallback produced it. At zero tax the class decomposition is the
/// proportional one and only the aggregates are unique.
EquilibriumReport taxed_equilibrium(const NetworkPair& net, const Demand& demand,
                                    const Sensitivities& sens,
                                    const TaxVector& taxes,
                                    double tol = kDefaultTol);

struct PropositionCheck {
  bool holds = false;
  TaxVector taxes;
  TaxBranch branch = TaxBranch::None;
  FlowAssignment optimum;
  FlowAssignment equilibrium;
  std::array<double, 2> discrepancy{};  // |equilibrium - optimum| per network
  EquilibriumReport report;
};

/// Applies optimal_tax and checks that the induced equilibrium aggregates
/// equal the optimal assignment within `tol`.
PropositionCheck verify_optimal_tax(const NetworkPair& net, const Demand& demand,
                                    const Sensitivities& sens, double tol);

struct ClassLatencies {
  double latency_a = 0.0;  // NaN when class A is empty
  double latency_b = 0.0;  // NaN when class B is empty
  double latency_no_tax = 0.0;
};

/// Flow-weighted mean latency of each class under the optimal tax, with the
/// common untaxed-equilibrium latency alongside.
ClassLatencies class_latencies(const NetworkPair& net, double demand,
                               double share_a, const Sensitivities& sens);

} // namespace nettax
