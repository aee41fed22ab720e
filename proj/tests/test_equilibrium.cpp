#include "nettax/equilibrium.hpp"
#include "instances.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nettax;

namespace {

const NetworkPair kNet{4.0, 11.0};
const Sensitivities kSens{2.0, 1.0};

constexpr double kF1Opt8 = 1.36675041928920;
constexpr double kF2Opt8 = 6.63324958071080;
constexpr double kL1Opt8 = 0.379758913596814;  // 1 / (4 - f1_opt)
constexpr double kL2Opt8 = 0.229003241307932;  // 1 / (11 - f2_opt)
constexpr double kCOpt8 = 2.03807130877451;

double violation_of(const EquilibriumReport& r, const NetworkPair& net,
                    const Sensitivities& sens, const TaxVector& taxes) {
  return wardrop_residual(net, sens, taxes, r.split, kDefaultTol);
}

} // namespace

TEST(ClassFlowSplitType, AggregatesAndConsistency) {
  const ClassFlowSplit s(1.0, 0.5, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(s.aggregate(1), 1.5);
  EXPECT_DOUBLE_EQ(s.aggregate(2), 5.0);
  EXPECT_DOUBLE_EQ(s.class_total(NetClass::A), 3.0);
  EXPECT_DOUBLE_EQ(s.class_total(NetClass::B), 3.5);
  EXPECT_TRUE(s.consistent_with(kNet, Demand(3.0, 3.5)));
  EXPECT_FALSE(s.consistent_with(kNet, Demand(3.0, 3.6)));
  EXPECT_FALSE(ClassFlowSplit(3.0, 1.0, 0.0, 0.0).consistent_with(kNet, Demand(3.0, 1.0)));
  EXPECT_THROW(ClassFlowSplit(-1.0, 0.0, 0.0, 0.0), InvalidParameter);
}

TEST(TaxedEquilibrium, OptimalTaxInducesOptimumAlphaABranch) {
  const TaxVector taxes{0.0, 0.075378};
  const auto r = taxed_equilibrium(kNet, Demand(7, 1), kSens, taxes);
  EXPECT_NEAR(r.split.aggregate(1), 1.3667, 1e-3);
  EXPECT_NEAR(r.split.aggregate(2), 6.6333, 1e-3);
  EXPECT_NEAR(r.split.flow(1, NetClass::B), 0.0, 1e-12);
  EXPECT_NEAR(r.split.flow(2, NetClass::B), 1.0, 1e-12);
  EXPECT_LE(r.residual, 1e-9);

  const auto grid = oracle::grid_wardrop(4, 11, 7, 1, 2, 1, 0.0, 0.075378, 1e-3);
  EXPECT_NEAR(r.split.aggregate(1), grid.aggregate1(), 2e-3);
  EXPECT_NEAR(r.split.flow(1, NetClass::B), grid.f1b, 2e-3);
}

TEST(TaxedEquilibrium, ZeroTaxReproducesUntaxedAggregates) {
  const auto r = taxed_equilibrium(kNet, Demand(4, 4), kSens, {});
  EXPECT_NEAR(r.split.aggregate(1), 0.5, 1e-9);
  EXPECT_NEAR(r.split.aggregate(2), 7.5, 1e-9);
  // proportional composition
  EXPECT_NEAR(r.split.flow(1, NetClass::A), 0.25, 1e-6);
  EXPECT_NEAR(r.split.flow(1, NetClass::B), 0.25, 1e-6);
  EXPECT_LE(r.residual, 1e-6);
}

TEST(TaxedEquilibrium, SingleClassHeavyTax) {
  const TaxVector taxes{0.0, 10.0};
  const auto r = taxed_equilibrium(kNet, Demand(0, 5), kSens, taxes);
  EXPECT_EQ(r.split.class_total(NetClass::A), 0.0);
  // Network 2 costs at least 10 while network 1 never exceeds 1/(4 - 3.9).
  // Class B therefore fills network 1 up to l1 = l2 + 10.
  const double f1 = r.split.aggregate(1);
  EXPECT_NEAR(1.0 / (4 - f1), 1.0 / (11 - (5 - f1)) + 10.0, 1e-9);
  EXPECT_LE(violation_of(r, kNet, kSens, taxes), 1e-9);
  const auto grid = oracle::grid_wardrop(4, 11, 0, 5, 2, 1, 0.0, 10.0, 1e-3);
  EXPECT_NEAR(f1, grid.aggregate1(), 2e-3);
}

TEST(TaxedEquilibrium, ZeroDemand) {
  const auto r = taxed_equilibrium(kNet, Demand(0, 0), kSens, {0.0, 1.0});
  EXPECT_EQ(r.split.aggregate(1), 0.0);
  EXPECT_EQ(r.split.aggregate(2), 0.0);
}

TEST(TaxedEquilibrium, RejectsOverloadAndBadTolerance) {
  EXPECT_THROW(taxed_equilibrium(kNet, Demand(10, 5), kSens, {}), DemandExceedsCapacity);
  EXPECT_THROW(taxed_equilibrium(kNet, Demand(1, 1), kSens, {}, 0.0), InvalidParameter);
  EXPECT_THROW(taxed_equilibrium(kNet, Demand(1, 1), kSens, {0.0, -1.0}), InvalidParameter);
}

TEST(TaxedEquilibrium, ReportsPerceivedCosts) {
  const TaxVector taxes{0.0, 0.2};
  const auto r = taxed_equilibrium(kNet, Demand(6, 3), kSens, taxes);
  const double l1 = oracle::mm1(4, r.split.aggregate(1));
  const double l2 = oracle::mm1(11, r.split.aggregate(2));
  EXPECT_NEAR(r.latency[0], l1, 1e-12);
  EXPECT_NEAR(r.latency[1], l2, 1e-12);
  EXPECT_NEAR(r.perceived_cost[1][0], l2 + 2 * 0.2, 1e-12);
  EXPECT_NEAR(r.perceived_cost[1][1], l2 + 1 * 0.2, 1e-12);
  EXPECT_NEAR(r.perceived_cost[0][0], l1, 1e-12);
}

TEST(TaxedEquilibrium, AgreesWithLatticeOracle) {
  // Small capacities keep the scan fast; the 200-instance version runs in
  // the acceptance suite.
  for (const auto& in : fixtures::taxed_instances(12, 77, 1e-3, 6.0)) {
    const NetworkPair net(in.c1, in.c2);
    const Sensitivities sens(in.alpha_a, in.alpha_b);
    const TaxVector taxes{0.0, in.tau2};
    const auto r = taxed_equilibrium(net, Demand(in.d_a, in.d_b), sens, taxes);
    const auto g = oracle::grid_wardrop(in.c1, in.c2, in.d_a, in.d_b, in.alpha_a,
                                        in.alpha_b, 0.0, in.tau2, 1e-3);
    EXPECT_NEAR(r.split.aggregate(1), g.aggregate1(), 2e-3)
        << in.c1 << " " << in.c2 << " " << in.d_a << " " << in.d_b << " " << in.tau2;
  }
}

TEST(TaxedEquilibrium, ResidualWithinToleranceOnRandomTaxes) {
  for (const auto& in : fixtures::taxed_instances(2000, 5, 1e-6)) {
    const NetworkPair net(in.c1, in.c2);
    const Sensitivities sens(in.alpha_a, in.alpha_b);
    const TaxVector taxes{0.0, in.tau2};
    const Demand dem(in.d_a, in.d_b);
    const auto r = taxed_equilibrium(net, dem, sens, taxes);
    EXPECT_TRUE(r.split.consistent_with(net, dem));
    EXPECT_LE(r.residual, r.pattern == SupportPattern::Bisection ? 1e-6 : 1e-9);
    EXPECT_LE(violation_of(r, net, sens, taxes), 1e-6);
  }
}

TEST(TaxedEquilibrium, ClassesSeparateUnderPositiveTax) {
  for (const auto& in : fixtures::taxed_instances(2000, 6, 1e-6)) {
    if (in.tau2 <= 0.0)
      continue;
    const NetworkPair net(in.c1, in.c2);
    const auto r = taxed_equilibrium(net, Demand(in.d_a, in.d_b),
                                     Sensitivities(in.alpha_a, in.alpha_b), {0.0, in.tau2});
    if (r.split.flow(1, NetClass::B) > 1e-9) {
      EXPECT_LE(r.split.flow(2, NetClass::A), 1e-9);
    }
  }
}

TEST(TaxedEquilibrium, ZeroTaxMatchesUntaxedForAnyComposition) {
  for (const auto& in : fixtures::cost_instances(500, 9)) {
    const NetworkPair net(in.c1, in.c2);
    for (double share : {0.0, 0.3, 1.0}) {
      const Demand dem(share * in.demand, (1 - share) * in.demand);
      const auto r = taxed_equilibrium(net, dem, kSens, {});
      const auto w = wardrop_no_tax(net, dem.total());
      EXPECT_NEAR(r.split.aggregate(1), w.f1, 1e-6 * std::max(1.0, in.demand));
    }
  }
}

TEST(VerifyOptimalTax, Examples) {
  auto c = verify_optimal_tax(kNet, Demand(7, 1), kSens, 1e-6);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.branch, TaxBranch::AlphaA);
  EXPECT_NEAR(c.equilibrium.f1, kF1Opt8, 1e-6);

  c = verify_optimal_tax(kNet, Demand(1, 7), kSens, 1e-6);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.branch, TaxBranch::AlphaB);
  EXPECT_NEAR(c.equilibrium.f2, kF2Opt8, 1e-6);

  c = verify_optimal_tax(kNet, Demand(2, 2), kSens, 1e-6);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.taxes.tau2, 0.0);
}

TEST(VerifyOptimalTax, HoldsAcrossParameterGrid) {
  int branch_a = 0, branch_b = 0;
  for (int i = 0; i < 10; ++i) {
    const double d = (0.3 + 0.65 * i / 9.0) * 15.0;
    for (int j = 0; j < 10; ++j) {
      const double share_b = j / 9.0;
      for (double ratio : {1.5, 2.0, 3.0, 5.0, 10.0}) {
        const auto c = verify_optimal_tax(kNet, Demand((1 - share_b) * d, share_b * d),
                                          Sensitivities(ratio, 1.0), 1e-5);
        EXPECT_TRUE(c.holds) << "D=" << d << " share_b=" << share_b << " ratio=" << ratio;
        branch_a += c.branch == TaxBranch::AlphaA;
        branch_b += c.branch == TaxBranch::AlphaB;
      }
    }
  }
  EXPECT_GT(branch_a, 0);
  EXPECT_GT(branch_b, 0);
}

TEST(ClassLatencies, Examples) {
  auto l = class_latencies(kNet, 8, 1.0, kSens);
  EXPECT_NEAR(l.latency_no_tax, 0.286, 1e-3);
  EXPECT_NEAR(l.latency_no_tax, 1.0 / 3.5, 1e-12);
  EXPECT_NEAR(l.latency_a, (kF1Opt8 * kL1Opt8 + kF2Opt8 * kL2Opt8) / 8.0, 1e-9);
  EXPECT_NEAR(l.latency_a, kCOpt8 / 8.0, 1e-9);
  EXPECT_TRUE(std::isnan(l.latency_b));

  // at share f1_opt / D class A exactly fills network 1
  l = class_latencies(kNet, 8, kF1Opt8 / 8.0, kSens);
  EXPECT_NEAR(l.latency_a, kL1Opt8, 1e-9);
  // 0.171 is marginally above that share; class A spills a little
  l = class_latencies(kNet, 8, 0.171, kSens);
  EXPECT_NEAR(l.latency_a, 0.380, 1e-3);

  for (double share : {0.0, 0.4, 1.0}) {
    l = class_latencies(kNet, 4, share, kSens);
    EXPECT_NEAR(l.latency_no_tax, 1.0 / 7.0, 1e-12);
    if (share > 0.0) {
      EXPECT_NEAR(l.latency_a, 1.0 / 7.0, 1e-9);
    }
    if (share < 1.0) {
      EXPECT_NEAR(l.latency_b, 1.0 / 7.0, 1e-9);
    }
  }
  EXPECT_TRUE(std::isnan(class_latencies(kNet, 8, 0.0, kSens).latency_a));
  EXPECT_THROW(class_latencies(kNet, 8, 1.5, kSens), InvalidParameter);
}

// Delay-sensitive users are better off than at the untaxed equilibrium.
// Class A is worse off whenever it is confined to network 1; once it also
// spills onto network 2 its mean latency can drop below the untaxed one.
TEST(ClassLatencies, TaxFavoursDelaySensitiveClass) {
  for (double d : {5.0, 8.0, 11.0, 14.0}) {
    const double f1_opt = optimal_assignment(kNet, d).f1;
    for (int k = 1; k < 100; ++k) {
      const double share = k / 100.0;
      const auto l = class_latencies(kNet, d, share, kSens);
      EXPECT_LE(l.latency_b, l.latency_no_tax + 1e-9) << d << " " << share;
      EXPECT_LE(l.latency_b, l.latency_a + 1e-9) << d << " " << share;
      if (share * d <= f1_opt) {
        EXPECT_LE(l.latency_no_tax, l.latency_a + 1e-9) << d << " " << share;
      }
    }
  }
}
