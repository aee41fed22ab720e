#include "nettax/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nettax {

namespace {

std::string describe_overflow(double demand, double capacity) {
  std::ostringstream os;
  os << "demand " << demand << " must stay below total capacity " << capacity;
  return os.str();
}

bool finite_non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

} // namespace

DemandExceedsCapacity::DemandExceedsCapacity(double demand, double capacity)
    : std::domain_error(describe_overflow(demand, capacity)), demand_(demand),
      capacity_(capacity) {}

NetworkPair::NetworkPair(double c1, double c2) : c1_(c1), c2_(c2) {
  if (!(std::isfinite(c1) && std::isfinite(c2)) || !(c1 > 0.0))
    throw InvalidParameter("capacities must be finite and positive");
  if (!(c2 > c1))
    throw InvalidParameter("network pair requires c2 > c1");
}

double NetworkPair::capacity(int network) const {
  switch (network) {
  case 1:
    return c1_;
  case 2:
    return c2_;
  default:
    throw InvalidParameter("network id must be 1 or 2");
  }
}

double NetworkPair::tax_threshold() const noexcept {
  return c2_ - std::sqrt(c1_ * c2_);
}

void NetworkPair::require_admissible(double demand) const {
  if (!finite_non_negative(demand))
    throw InvalidParameter("demand must be finite and non-negative");
  if (demand >= total_capacity())
    throw DemandExceedsCapacity(demand, total_capacity());
}

Sensitivities::Sensitivities(double alpha_a, double alpha_b)
    : alpha_a_(alpha_a), alpha_b_(alpha_b) {
  if (!(std::isfinite(alpha_a) && std::isfinite(alpha_b)) || !(alpha_b > 0.0))
    throw InvalidParameter("sensitivities must be finite and positive");
  if (!(alpha_a > alpha_b))
    throw InvalidParameter("sensitivities require alpha_A > alpha_B");
}

Demand::Demand(double d_a, double d_b) : d_a_(d_a), d_b_(d_b) {
  if (!finite_non_negative(d_a) || !finite_non_negative(d_b))
    throw InvalidParameter("class demands must be finite and non-negative");
}

bool FlowAssignment::feasible_for(double demand, double tol) const noexcept {
  return f1 >= 0.0 && f2 >= 0.0 &&
         std::abs(f1 + f2 - demand) <= tol * std::max(1.0, demand);
}

std::string to_string(TaxBranch branch) {
  switch (branch) {
  case TaxBranch::None:
    return "none";
  case TaxBranch::AlphaA:
    return "alpha_A";
  case TaxBranch::AlphaB:
    return "alpha_B";
  }
  return "unknown";
}

double delay(double capacity, double flow) noexcept {
  if (flow >= capacity)
    return kInfinity;
  return 1.0 / (capacity - flow);
}

double link_cost(double capacity, double flow) noexcept {
  if (flow == 0.0)
    return 0.0;
  return flow * delay(capacity, flow);
}

double total_cost(const NetworkPair& net, const FlowAssignment& flows) noexcept {
  return link_cost(net.c1(), flows.f1) + link_cost(net.c2(), flows.f2);
}

FlowAssignment wardrop_no_tax(const NetworkPair& net, double demand) {
  net.require_admissible(demand);
  const double c1 = net.c1();
  const double c2 = net.c2();
  if (demand <= c2 - c1)
    return {0.0, demand};
  const double f1 = (demand + c1 - c2) / 2.0;
  return {f1, demand - f1};
}

FlowAssignment optimal_assignment(const NetworkPair& net, double demand) {
  net.require_admissible(demand);
  if (demand <= net.tax_threshold())
    return {0.0, demand};
  const double s1 = std::sqrt(net.c1());
  const double s2 = std::sqrt(net.c2());
  // Equal marginal costs c1/(c1-f1)^2 = c2/(c2-f2)^2 on the simplex.
  const double f1 =
      std::max(0.0, ((demand - net.c2()) * s1 + net.c1() * s2) / (s1 + s2));
  return {f1, demand - f1};
}

double optimal_cost(const NetworkPair& net, double demand) {
  net.require_admissible(demand);
  const double c1 = net.c1();
  const double c2 = net.c2();
  if (demand <= net.tax_threshold())
    return demand / (c2 - demand);
  return (2.0 * demand - c1 - c2 + 2.0 * std::sqrt(c1 * c2)) /
         (c1 + c2 - demand);
}

double tax_threshold(const NetworkPair& net) noexcept {
  return net.tax_threshold();
}

TaxBranch tax_branch(const NetworkPair& net, double demand,
                     double class_b_load, double tol) {
  net.require_admissible(demand);
  if (demand <= net.tax_threshold() + tol)
    return TaxBranch::None;
  const double f2_opt = optimal_assignment(net, demand).f2;
  return class_b_load <= f2_opt + tol ? TaxBranch::AlphaA : TaxBranch::AlphaB;
}

double tax_for_branch(const NetworkPair& net, double demand,
                      const Sensitivities& sens, TaxBranch branch) {
  net.require_admissible(demand);
  if (branch == TaxBranch::None)
    return 0.0;
  const double alpha =
      branch == TaxBranch::AlphaA ? sens.alpha_a() : sens.alpha_b();
  const double c1 = net.c1();
  const double c2 = net.c2();
  return (c2 - c1) / (alpha * std::sqrt(c1 * c2) * (c1 + c2 - demand));
}

TaxVector optimal_tax(const NetworkPair& net, const Demand& demand,
                      const Sensitivities& sens, double tol) {
  const double total = demand.total();
  const TaxBranch branch = tax_branch(net, total, demand.d_b(), tol);
  return {0.0, tax_for_branch(net, total, sens, branch)};
}

} // namespace nettax
