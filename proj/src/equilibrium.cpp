#include "nettax/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace nettax {

namespace {

constexpr int kBisectionIterations = 200;
constexpr double kBisectionTol = 1e-6;

int idx(NetClass cls) { return static_cast<int>(cls); }

double alpha_of(const Sensitivities& sens, NetClass cls) {
  return cls == NetClass::A ? sens.alpha_a() : sens.alpha_b();
}

double tax_on(const TaxVector& taxes, int network) {
  return network == 1 ? taxes.tau1 : taxes.tau2;
}

// Latency gap l1(x) - l2(D - x); +inf once network 1 saturates, -inf once
// network 2 does.
class LatencyGap {
public:
  LatencyGap(const NetworkPair& net, double demand) : net_(net), demand_(demand) {}

  double operator()(double x) const {
    if (x >= net_.c1())
      return kInfinity;
    if (demand_ - x >= net_.c2())
      return -kInfinity;
    return delay(net_.c1(), x) - delay(net_.c2(), demand_ - x);
  }

  // Unique x in (D - c2, c1) with gap(x) = target. The gap is
  // 1/(a - x) - 1/(b + x) with a = c1, b = c2 - D; clearing denominators
  // gives t x^2 + (2 - t (a - b)) x + (b - a - t a b) = 0.
  double solve(double target) const {
    const double a = net_.c1();
    const double b = net_.c2() - demand_;
    if (target == 0.0)
      return (a - b) / 2.0;
    const double qa = target;
    const double qb = 2.0 - target * (a - b);
    const double qc = b - a - target * a * b;
    const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_err = kInfinity;
    for (double r : {q / qa, q != 0.0 ? qc / q : best}) {
      if (!(r > -b && r < a))
        continue;
      const double err = std::abs((*this)(r) - target);
      if (err < best_err) {
        best = r;
        best_err = err;
      }
    }
    return best;
  }

private:
  const NetworkPair& net_;
  double demand_;
};

void fill_diagnostics(const NetworkPair& net, const Sensitivities& sens,
                      const TaxVector& taxes, EquilibriumReport& report,
                      double tol) {
  const FlowAssignment agg = report.split.aggregates();
  report.latency = {delay(net.c1(), agg.f1), delay(net.c2(), agg.f2)};
  for (int p = 1; p <= 2; ++p)
    for (NetClass cls : {NetClass::A, NetClass::B})
      report.perceived_cost[p - 1][idx(cls)] =
          report.latency[p - 1] + alpha_of(sens, cls) * tax_on(taxes, p);
  report.residual = wardrop_residual(net, sens, taxes, report.split, tol);
}

// Split with aggregate `x` on network 1: classes fill network 1 in order
// (first, second).
ClassFlowSplit ordered_split(NetClass first, double d_first, double d_second,
                             double x) {
  const double first_on_1 = std::clamp(x, 0.0, d_first);
  const double second_on_1 = std::clamp(x - first_on_1, 0.0, d_second);
  double f1[2]{};
  double f2[2]{};
  const int fi = idx(first);
  const int si = 1 - fi;
  f1[fi] = first_on_1;
  f2[fi] = d_first - first_on_1;
  f1[si] = second_on_1;
  f2[si] = d_second - second_on_1;
  return {f1[0], f1[1], f2[0], f2[1]};
}

ClassFlowSplit proportional_split(const Demand& demand, double x) {
  const double total = demand.total();
  const double share = total > 0.0 ? x / total : 0.0;
  const double f1a = demand.d_a() * share;
  const double f1b = demand.d_b() * share;
  return {f1a, f1b, demand.d_a() - f1a, demand.d_b() - f1b};
}

// Network-1 aggregate of the equilibrium, by bisection on the monotone
// inclusion x in N(gap(x)) where N(y) sums the demand of every class whose
// threshold exceeds y.
double bisect_aggregate(const LatencyGap& gap, const Demand& demand,
                        double t_a, double t_b) {
  const double total = demand.total();
  double lo = 0.0;
  double hi = total;
  for (int it = 0; it < kBisectionIterations && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const double y = gap(mid);
    const double strict = (y < t_a ? demand.d_a() : 0.0) + (y < t_b ? demand.d_b() : 0.0);
    const double loose = (y <= t_a ? demand.d_a() : 0.0) + (y <= t_b ? demand.d_b() : 0.0);
    if (mid < strict)
      lo = mid;
    else if (mid > loose)
      hi = mid;
    else
      return mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

ClassFlowSplit::ClassFlowSplit(double f1a, double f1b, double f2a, double f2b) {
  for (double f : {f1a, f1b, f2a, f2b})
    if (!(std::isfinite(f) && f >= 0.0))
      throw InvalidParameter("class flows must be finite and non-negative");
  f_[0] = {f1a, f1b};
  f_[1] = {f2a, f2b};
}

double ClassFlowSplit::flow(int network, NetClass cls) const {
  if (network != 1 && network != 2)
    throw InvalidParameter("network id must be 1 or 2");
  return f_[network - 1][idx(cls)];
}

double ClassFlowSplit::aggregate(int network) const {
  return flow(network, NetClass::A) + flow(network, NetClass::B);
}

bool ClassFlowSplit::consistent_with(const NetworkPair& net, const Demand& demand,
                                     double tol) const {
  for (const auto& row : f_)
    for (double v : row)
      if (!(v >= 0.0))
        return false;
  const double da = demand.d_a();
  const double db = demand.d_b();
  if (std::abs(class_total(NetClass::A) - da) > tol * std::max(1.0, da) ||
      std::abs(class_total(NetClass::B) - db) > tol * std::max(1.0, db))
    return false;
  return aggregate(1) < net.c1() && aggregate(2) < net.c2();
}

std::string to_string(SupportPattern pattern) {
  switch (pattern) {
  case SupportPattern::SecondOnTwoFirstSplit:
    return "second-on-2/first-split";
  case SupportPattern::SecondOnTwoFirstOnOne:
    return "second-on-2/first-on-1";
  case SupportPattern::SecondSplitFirstOnOne:
    return "second-split/first-on-1";
  case SupportPattern::AllOnTwo:
    return "all-on-2";
  case SupportPattern::AllOnOne:
    return "all-on-1";
  case SupportPattern::Bisection:
    return "bisection";
  }
  return "unknown";
}

double wardrop_residual(const NetworkPair& net, const Sensitivities& sens,
                        const TaxVector& taxes, const ClassFlowSplit& split,
                        double used_tol) {
  const double lat[2] = {delay(net.c1(), split.aggregate(1)),
                         delay(net.c2(), split.aggregate(2))};
  double worst = 0.0;
  for (int p = 1; p <= 2; ++p) {
    const int other = 3 - p;
    for (NetClass cls : {NetClass::A, NetClass::B}) {
      if (!(split.flow(p, cls) > used_tol))
        continue;
      const double alpha = alpha_of(sens, cls);
      const double own = lat[p - 1] + alpha * tax_on(taxes, p);
      const double alt = lat[other - 1] + alpha * tax_on(taxes, other);
      if (std::isinf(own))
        return kInfinity;
      worst = std::max(worst, own - alt);
    }
  }
  return worst;
}

EquilibriumReport taxed_equilibrium(const NetworkPair& net, const Demand& demand,
                                    const Sensitivities& sens,
                                    const TaxVector& taxes, double tol) {
  const double total = demand.total();
  net.require_admissible(total);
  if (!(tol > 0.0))
    throw InvalidParameter("equilibrium tolerance must be positive");
  if (!(taxes.tau1 >= 0.0 && taxes.tau2 >= 0.0) ||
      !(std::isfinite(taxes.tau1) && std::isfinite(taxes.tau2)))
    throw InvalidParameter("taxes must be finite and non-negative");

  EquilibriumReport report;
  const double spread = taxes.tau2 - taxes.tau1;
  const double t_a = sens.alpha_a() * spread;
  const double t_b = sens.alpha_b() * spread;
  const LatencyGap gap(net, total);

  // Iterative paths are held to the looser of tol and kBisectionTol.
  auto accept = [&](const ClassFlowSplit& split, SupportPattern pattern) {
    if (!split.consistent_with(net, demand, tol))
      return false;
    report.split = split;
    report.pattern = pattern;
    fill_diagnostics(net, sens, taxes, report, tol);
    const double bound =
        pattern == SupportPattern::Bisection ? std::max(tol, kBisectionTol) : tol;
    return report.residual <= bound;
  };

  if (total == 0.0) {
    accept(ClassFlowSplit{}, SupportPattern::AllOnTwo);
    return report;
  }

  if (spread != 0.0) {
    // The class with the larger threshold moves onto network 1 first.
    const NetClass first = spread > 0.0 ? NetClass::A : NetClass::B;
    const double d_first = first == NetClass::A ? demand.d_a() : demand.d_b();
    const double d_second = total - d_first;
    const double t_first = std::max(t_a, t_b);
    const double t_second = std::min(t_a, t_b);

    const std::optional<double> first_split = [&]() -> std::optional<double> {
      const double x = gap.solve(t_first);
      if (x > 0.0 && x < d_first)
        return x;
      return std::nullopt;
    }();
    const std::optional<double> second_split = [&]() -> std::optional<double> {
      const double x = gap.solve(t_second);
      if (x > d_first && x < total)
        return x;
      return std::nullopt;
    }();

    if (first_split &&
        accept(ordered_split(first, d_first, d_second, *first_split),
               SupportPattern::SecondOnTwoFirstSplit))
      return report;
    if (d_first > 0.0 && d_second > 0.0 &&
        accept(ordered_split(first, d_first, d_second, d_first),
               SupportPattern::SecondOnTwoFirstOnOne))
      return report;
    if (second_split &&
        accept(ordered_split(first, d_first, d_second, *second_split),
               SupportPattern::SecondSplitFirstOnOne))
      return report;
    if (accept(ordered_split(first, d_first, d_second, 0.0), SupportPattern::AllOnTwo))
      return report;
    if (accept(ordered_split(first, d_first, d_second, total), SupportPattern::AllOnOne))
      return report;

    const double x = bisect_aggregate(gap, demand, t_a, t_b);
    if (accept(ordered_split(first, d_first, d_second, x), SupportPattern::Bisection))
      return report;
  } else {
    // Equal thresholds: the game is homogeneous and only aggregates matter.
    const double x = bisect_aggregate(gap, demand, t_a, t_b);
    if (accept(proportional_split(demand, x), SupportPattern::Bisection))
      return report;
  }

  throw NoEquilibriumFound("no candidate support satisfies the Wardrop condition");
}

PropositionCheck verify_optimal_tax(const NetworkPair& net, const Demand& demand,
                                    const Sensitivities& sens, double tol) {
  PropositionCheck check;
  const double total = demand.total();
  check.taxes = optimal_tax(net, demand, sens);
  check.branch = tax_branch(net, total, demand.d_b());
  check.optimum = optimal_assignment(net, total);
  check.report = taxed_equilibrium(net, demand, sens, check.taxes, tol);
  check.equilibrium = check.report.split.aggregates();
  check.discrepancy = {std::abs(check.equilibrium.f1 - check.optimum.f1),
                       std::abs(check.equilibrium.f2 - check.optimum.f2)};
  check.holds = check.discrepancy[0] <= tol && check.discrepancy[1] <= tol;
  return check;
}

ClassLatencies class_latencies(const NetworkPair& net, double demand,
                               double share_a, const Sensitivities& sens) {
  if (!(share_a >= 0.0 && share_a <= 1.0))
    throw InvalidParameter("class-A share must lie in [0, 1]");
  net.require_admissible(demand);

  const double d_a = share_a * demand;
  const Demand split_demand(d_a, std::max(0.0, demand - d_a));
  const EquilibriumReport report = taxed_equilibrium(
      net, split_demand, sens, optimal_tax(net, split_demand, sens));

  auto mean_latency = [&](NetClass cls) {
    const double d = report.split.class_total(cls);
    if (d <= 0.0)
      return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (int p = 1; p <= 2; ++p) {
      const double f = report.split.flow(p, cls);
      if (f > 0.0)
        acc += f * report.latency[p - 1];
    }
    return acc / d;
  };

  ClassLatencies out;
  out.latency_a = mean_latency(NetClass::A);
  out.latency_b = mean_latency(NetClass::B);
  const FlowAssignment we = wardrop_no_tax(net, demand);
  out.latency_no_tax = demand > 0.0 ? total_cost(net, we) / demand
                                    : delay(net.c2(), 0.0);
  return out;
}

} // namespace nettax
