#pragma once

// Closed-form results for two-class selfish network selection over two
// parallel M/M/1 links: latency, total delay, the untaxed Wardrop
// equilibrium, the socially optimal split and the optimal network-2 tax.
//
// Capacities and flows are throughputs in Mbit/s. Latencies are in
// normalized packet-time units (mean sojourn time with unit packet size).

#include <limits>
#include <stdexcept>
#include <string>

namespace nettax {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised on a violated type invariant or operation precondition.
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Total demand reaches or exceeds c1 + c2; no finite-cost assignment exists.
class DemandExceedsCapacity : public std::domain_error {
public:
  DemandExceedsCapacity(double demand, double capacity);
  double demand() const noexcept { return demand_; }
  double capacity() const noexcept { return capacity_; }

private:
  double demand_;
  double capacity_;
};

/// Two access networks; network 2 is the larger one (c2 > c1 > 0).
class NetworkPair {
public:
  NetworkPair(double c1, double c2);

  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  double capacity(int network) const;
  double total_capacity() const noexcept { return c1_ + c2_; }

  /// Demand c2 - sqrt(c1 c2) up to which the untaxed equilibrium is optimal.
  double tax_threshold() const noexcept;

  /// Throws DemandExceedsCapacity unless 0 <= demand < c1 + c2.
  void require_admissible(double demand) const;

  bool operator==(const NetworkPair&) const = default;

private:
  double c1_;
  double c2_;
};

/// Tax sensitivities; class A is the more price-averse (alpha_A > alpha_B > 0).
class Sensitivities {
public:
  Sensitivities(double alpha_a, double alpha_b);

  double alpha_a() const noexcept { return alpha_a_; }
  double alpha_b() const noexcept { return alpha_b_; }

  bool operator==(const Sensitivities&) const = default;

private:
  double alpha_a_;
  double alpha_b_;
};

/// Aggregate per-class throughput demand. Either class may be empty.
class Demand {
public:
  Demand(double d_a, double d_b);

  double d_a() const noexcept { return d_a_; }
  double d_b() const noexcept { return d_b_; }
  double total() const noexcept { return d_a_ + d_b_; }

private:
  double d_a_;
  double d_b_;
};

/// Aggregate flow on each network.
struct FlowAssignment {
  double f1 = 0.0;
  double f2 = 0.0;

  double total() const noexcept { return f1 + f2; }
  /// Non-negative and |f1 + f2 - demand| <= tol * max(1, demand).
  bool feasible_for(double demand, double tol = kDefaultTol) const noexcept;
};

/// Per-unit-flow prices on the two networks.
struct TaxVector {
  double tau1 = 0.0;
  double tau2 = 0.0;

  bool operator==(const TaxVector&) const = default;
};

/// Which expression of the optimal tax applies.
enum class TaxBranch {
  None,   // demand at or below the threshold, no tax
  AlphaA, // d_B <= f2_opt: class A is the marginal class
  AlphaB, // d_B > f2_opt: class B is the marginal class
};

std::string to_string(TaxBranch branch);

/// M/M/1 mean sojourn time 1/(c - f), or +infinity once f >= c.
double delay(double capacity, double flow) noexcept;

/// f * delay(c, f) with 0 * inf = 0 for an idle saturated link.
double link_cost(double capacity, double flow) noexcept;

/// Total delay f1 l1(f1) + f2 l2(f2).
double total_cost(const NetworkPair& net, const FlowAssignment& flows) noexcept;

/// Unique untaxed Wardrop equilibrium (equal latencies on used links).
FlowAssignment wardrop_no_tax(const NetworkPair& net, double demand);

/// Unique minimizer of total_cost over {f1 + f2 = demand, f >= 0}.
FlowAssignment optimal_assignment(const NetworkPair& net, double demand);

/// Minimum total delay for the given demand.
double optimal_cost(const NetworkPair& net, double demand);

/// Free-function form of NetworkPair::tax_threshold.
double tax_threshold(const NetworkPair& net) noexcept;

/// Branch selection for the optimal tax given total demand and an observed
/// or estimated class-B load. Demand at the threshold and ties
/// d_B == f2_opt (both within `tol`) resolve to None and AlphaA.
TaxBranch tax_branch(const NetworkPair& net, double demand, double class_b_load,
                     double tol = kDefaultTol);

/// Magnitude of the network-2 tax for the given branch; zero for None.
double tax_for_branch(const NetworkPair& net, double demand,
                      const Sensitivities& sens, TaxBranch branch);

/// Tax vector that makes the taxed equilibrium coincide with the optimum.
/// tau1 is always zero.
TaxVector optimal_tax(const NetworkPair& net, const Demand& demand,
                      const Sensitivities& sens, double tol = kDefaultTol);

} // namespace nettax
