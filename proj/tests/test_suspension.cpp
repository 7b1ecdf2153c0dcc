#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sflow/suspension.hpp"

using namespace sflow;

namespace {

SuspensionFlow two_roof_flow(const Sft& base) {
  return SuspensionFlow(base, RoofFunction(LocallyConstantFunction::per_symbol(base, {1.0, 2.0})));
}

SuspensionFlow random_flow(const Sft& base, int depth, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.3, 2.7);
  return SuspensionFlow(base, RoofFunction(LocallyConstantFunction::from(base, depth, [&](std::span<const int>) { return u(rng); })));
}

LocallyConstantFunction random_xi(const Sft& base, int depth, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return LocallyConstantFunction::from(base, depth, [&](std::span<const int>) { return u(rng); });
}

PeriodicPoint random_periodic(const Sft& sft, int period, std::mt19937& rng) {
  const auto pts = periodic_points(sft, period);
  return pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(rng)];
}

}  // namespace

TEST(FlowMap, UnitRoof) {
  const Sft sft = Sft::full_shift(2);
  const auto flow = SuspensionFlow::constant_roof(sft, 1.0);
  const BasePoint x(PeriodicPoint(sft, {0, 1, 1}));
  const auto p = flow_map(flow, {x, 0.0}, 1.0);
  EXPECT_EQ(p.height, 0.0);
  EXPECT_EQ(p.base.window(3), (Word{1, 1, 0}));
  const auto q = flow_map(flow, {x, 0.25}, 0.5);
  EXPECT_EQ(q.height, 0.75);
  EXPECT_EQ(q.base.window(3), (Word{0, 1, 1}));
}

TEST(FlowMap, GoldenMeanTwoRoofs) {
  const Sft sft = Sft::golden_mean();
  const auto flow = two_roof_flow(sft);
  const auto p = flow_map(flow, {BasePoint(PeriodicPoint(sft, {0, 1, 0})), 0.0}, 3.5);
  // roofs 1 and 2 are crossed; the third symbol (0) is reached at time 3
  EXPECT_DOUBLE_EQ(p.height, 0.5);
  EXPECT_EQ(p.base.window(3), (Word{0, 0, 1}));
}

TEST(FlowMap, Errors) {
  const Sft sft = Sft::full_shift(2);
  const auto flow = SuspensionFlow::constant_roof(sft, 1.0);
  const FlowPoint p{BasePoint(PeriodicPoint(sft, {0})), 0.0};
  EXPECT_THROW(flow_map(flow, p, -0.1), InvalidArgument);
  EXPECT_THROW(flow_map(flow, p, INFINITY), InvalidArgument);
  // finite words run out
  EXPECT_THROW(flow_map(flow, {BasePoint(Word{0, 1}), 0.0}, 5.0), InvalidArgument);
  EXPECT_THROW(flow_integral(flow, FlowFunction::constant(1.0), p, -1.0), InvalidArgument);
}

TEST(FlowMap, Semigroup) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> time(0.0, 25.0);
  for (const Sft& sft : {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3)}) {
    const auto flow = random_flow(sft, 2, rng);
    for (int trial = 0; trial < 50; ++trial) {
      const PeriodicPoint x = random_periodic(sft, 1 + trial % 6, rng);
      std::uniform_real_distribution<double> h(0.0, flow.roof_at(BasePoint(x)));
      const FlowPoint p{BasePoint(x), h(rng)};
      const double t = time(rng), s = time(rng);
      const auto direct = flow_map(flow, p, t + s);
      const auto twice = flow_map(flow, flow_map(flow, p, t), s);
      EXPECT_NEAR(direct.height, twice.height, 1e-12);
      EXPECT_EQ(direct.base.window(12), twice.base.window(12));
      EXPECT_GE(direct.height, 0.0);
      EXPECT_LT(direct.height, flow.roof_at(direct.base));
    }
  }
}

TEST(IG, Examples) {
  const Sft sft = Sft::full_shift(2);
  const auto flow = two_roof_flow(sft);
  EXPECT_EQ(I_g(flow, FlowFunction::constant(0.0), Word{1}), 0.0);
  const auto xi = LocallyConstantFunction::per_symbol(sft, {0.3, -1.7});
  EXPECT_EQ(I_g(flow, lift(flow, xi), Word{0}), 0.3);
  EXPECT_EQ(I_g(flow, lift(flow, xi), Word{1}), -1.7);
  const auto height = FlowFunction::sampled(1, [](std::span<const int>, double s) { return s; });
  EXPECT_NEAR(I_g(flow, height, Word{1}), 2.0, 1e-9);
  EXPECT_NEAR(I_g(flow, height, Word{0}), 0.5, 1e-9);
}

TEST(IG, SampledMatchesMidpointOracle) {
  const Sft sft = Sft::golden_mean();
  const auto flow = two_roof_flow(sft);
  const auto g = FlowFunction::sampled(2, [](std::span<const int> w, double s) { return std::sin(3.0 * s + w[1]) + w[0] * s * s; });
  for (const auto& w : admissible_words(sft, 2)) {
    const double tau = w[0] ? 2.0 : 1.0;
    const double expected = oracle::midpoint([&](double s) { return std::sin(3.0 * s + w[1]) + w[0] * s * s; }, 0.0, tau, 200000);
    EXPECT_NEAR(I_g(flow, g, w), expected, 1e-9);
  }
}

TEST(InduceMeasure, Examples) {
  const Sft sft = Sft::full_shift(2);
  const auto flow = two_roof_flow(sft);
  const auto nu = gibbs_measure(sft, LocallyConstantFunction::constant(sft, 0.0));
  const auto mu = induce_measure(flow, nu);
  EXPECT_NEAR(mu.integrate(FlowFunction::constant(1.0)), 1.0, 1e-9);
  EXPECT_NEAR(mu.mean_roof(), 1.5, 1e-12);
  EXPECT_NEAR(mu.integrate(FlowFunction::from_base(LocallyConstantFunction::indicator(sft, {1}))), 2.0 / 3.0, 1e-9);

  const auto unit = SuspensionFlow::constant_roof(sft, 1.0);
  const auto xi = LocallyConstantFunction::per_symbol(sft, {0.4, 2.0});
  EXPECT_NEAR(induce_measure(unit, nu).integrate(lift(unit, xi)), integrate(nu, xi), 1e-12);
  EXPECT_THROW(induce_measure(flow, gibbs_measure(Sft::full_shift(3), LocallyConstantFunction::constant(Sft::full_shift(3), 0.0))),
               InvalidArgument);
}

TEST(Abramov, Examples) {
  const Sft golden = Sft::golden_mean();
  const auto parry = gibbs_measure(golden, LocallyConstantFunction::constant(golden, 0.0));
  EXPECT_NEAR(abramov_entropy(SuspensionFlow::constant_roof(golden, 1.0), parry), std::log(oracle::golden()), 1e-12);
  EXPECT_NEAR(abramov_entropy(SuspensionFlow::constant_roof(golden, 2.0), parry), std::log(oracle::golden()) / 2, 1e-12);
  const auto point = GibbsMarkovMeasure::periodic_orbit(golden, PeriodicPoint(golden, {0}));
  EXPECT_EQ(abramov_entropy(two_roof_flow(golden), point), 0.0);
}

TEST(Abramov, Consistency) {
  std::mt19937 rng(43);
  for (const Sft& sft : {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto flow = random_flow(sft, 1 + trial % 3, rng);
      const auto nu = gibbs_measure(sft, random_xi(sft, 2, rng));
      const double h = abramov_entropy(flow, nu);
      EXPECT_NEAR(h * integrate(nu, flow.roof().function()), entropy(nu), 1e-9);
      EXPECT_NEAR(induce_measure(flow, nu).entropy(), h, 1e-12);
    }
  }
}

TEST(FlowPressure, Examples) {
  const Sft sft = Sft::full_shift(2);
  const auto unit = SuspensionFlow::constant_roof(sft, 1.0);
  EXPECT_NEAR(flow_pressure(unit, FlowFunction::constant(0.0)), std::log(2.0), 1e-10);
  EXPECT_NEAR(flow_pressure(unit, FlowFunction::constant(0.8)), std::log(2.0) + 0.8, 1e-10);
  EXPECT_NEAR(flow_pressure(SuspensionFlow::constant_roof(Sft::golden_mean(), 1.0), FlowFunction::constant(-0.3)),
              std::log(oracle::golden()) - 0.3, 1e-10);

  const double root = oracle::newton([](double s) { return std::exp(-s) + std::exp(-2 * s) - 1; },
                                     [](double s) { return -std::exp(-s) - 2 * std::exp(-2 * s); }, 0.5);
  EXPECT_NEAR(root, std::log(oracle::golden()), 1e-14);
  EXPECT_NEAR(flow_pressure(two_roof_flow(sft), FlowFunction::constant(0.0)), root, 1e-10);
}

TEST(FlowPressure, UnitRoofMatchesBasePressure) {
  std::mt19937 rng(47);
  for (const Sft& sft : {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3)}) {
    const auto unit = SuspensionFlow::constant_roof(sft, 1.0);
    const auto xi = random_xi(sft, 2, rng);
    EXPECT_NEAR(flow_pressure(unit, lift(unit, xi)), pressure(sft, xi), 1e-9);
  }
}

TEST(FlowPressure, RootSolvesEquationAndDominatesMeasures) {
  std::mt19937 rng(53);
  const Sft sft = Sft::golden_mean();
  const auto flow = random_flow(sft, 2, rng);
  const auto xi = random_xi(sft, 2, rng);
  const auto b = lift(flow, xi);
  const double s = flow_pressure(flow, b);
  EXPECT_NEAR(pressure(sft, xi - s * flow.roof().function()), 0.0, 1e-10);
  // flow variational inequality over induced measures; equality at the equilibrium state
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = induce_measure(flow, gibbs_measure(sft, random_xi(sft, 2, rng)));
    EXPECT_LE(mu.entropy() + mu.integrate(b), s + 1e-9);
  }
  const auto eq = induce_measure(flow, gibbs_measure(sft, xi - s * flow.roof().function()));
  EXPECT_NEAR(eq.entropy() + eq.integrate(b), s, 1e-9);
}

TEST(Lift, Examples) {
  const Sft sft = Sft::full_shift(2);
  const auto flow = two_roof_flow(sft);
  const auto zero = lift(flow, LocallyConstantFunction::constant(sft, 0.0));
  for (double s : {0.0, 0.3, 0.9}) EXPECT_EQ(zero(flow, Word{0}, s), 0.0);

  const auto b = lift(flow, flow.roof().function());
  for (int sym : {0, 1}) {
    const double tau = sym ? 2.0 : 1.0;
    for (double u : {0.1, 0.5, 0.75}) EXPECT_NEAR(b(flow, Word{sym}, u * tau), 6 * u * (1 - u), 1e-15);
    EXPECT_EQ(I_g(flow, b, Word{sym}), tau);
  }
  EXPECT_THROW(lift(flow, LocallyConstantFunction::constant(Sft::golden_mean(), 1.0)), InvalidArgument);
}

TEST(Lift, QuadratureRecoversXi) {
  std::mt19937 rng(59);
  for (const Sft& sft : {Sft::full_shift(2), Sft::golden_mean()}) {
    const auto flow = random_flow(sft, 2, rng);
    const auto xi = random_xi(sft, 3, rng);
    for (const auto& profile : {BumpProfile::smoothstep(), BumpProfile::smootherstep()}) {
      const auto b = lift(flow, xi, profile);
      for (const auto& w : admissible_words(sft, 3)) {
        const double tau = flow.roof()(w);
        EXPECT_NEAR(oracle::midpoint([&](double s) { return b(flow, w, s); }, 0.0, tau, 100000), xi(w), 1e-9);
      }
    }
  }
}

TEST(Lift, ContinuousAcrossRoof) {
  std::mt19937 rng(61);
  const Sft sft = Sft::golden_mean();
  const auto flow = random_flow(sft, 2, rng);
  const auto b = lift(flow, random_xi(sft, 2, rng));
  for (const auto& w : admissible_words(sft, 3)) {
    const double tau = flow.roof()(w);
    const std::span<const int> next(w.data() + 1, 2);
    EXPECT_NEAR(b(flow, w, tau * (1 - 1e-9)), b(flow, next, 0.0), 1e-7);
    EXPECT_EQ(b(flow, next, 0.0), 0.0);
  }
}

TEST(Lift, BirkhoffRoofIdentity) {
  std::mt19937 rng(67);
  for (const Sft& sft : {Sft::full_shift(2), Sft::golden_mean(), Sft::full_shift(3)}) {
    const auto flow = random_flow(sft, 2, rng);
    const auto xi = random_xi(sft, 2, rng);
    const auto b = lift(flow, xi);
    for (int trial = 0; trial < 10; ++trial) {
      const PeriodicPoint x = random_periodic(sft, 1 + trial % 5, rng);
      const int n = 1 + trial;
      const Word w = x.prefix(n + 1);
      const double tau_n = flow.roof_sum(w, n);
      EXPECT_NEAR(flow_integral(flow, b, {BasePoint(x), 0.0}, tau_n), birkhoff_sum(xi, w, n), 1e-9);
    }
  }
}

TEST(Lift, PartialFlightsMatchQuadrature) {
  std::mt19937 rng(71);
  const Sft sft = Sft::full_shift(2);
  const auto flow = random_flow(sft, 1, rng);
  const auto b = lift(flow, random_xi(sft, 1, rng));
  const PeriodicPoint x(sft, {0, 1, 1});
  // integrate the same path by stepping the flow with a fine midpoint rule
  const double start = 0.37, t = 4.2;
  const FlowPoint p{BasePoint(x), start};
  const double expected =
      oracle::midpoint([&](double s) { return b(flow, flow_map(flow, p, s)); }, 0.0, t, 200000);
  EXPECT_NEAR(flow_integral(flow, b, p, t), expected, 1e-6);
}

TEST(BumpProfile, Properties) {
  for (const auto& psi : {BumpProfile::smoothstep(), BumpProfile::smootherstep()}) {
    EXPECT_EQ(psi.value(0.0), 0.0);
    EXPECT_EQ(psi.value(1.0), 1.0);
    EXPECT_EQ(psi.derivative(0.0), 0.0);
    EXPECT_EQ(psi.derivative(1.0), 0.0);
    EXPECT_NEAR(oracle::midpoint(psi.derivative, 0.0, 1.0, 10000), 1.0, 1e-7);
    for (int i = 0; i <= 100; ++i) EXPECT_GE(psi.derivative(i / 100.0), 0.0);
  }
  EXPECT_EQ(BumpProfile::by_name("smootherstep").name, "smootherstep");
  EXPECT_THROW(BumpProfile::by_name("tent"), InvalidArgument);
}

TEST(RoofFunction, RejectsNonPositive) {
  const Sft sft = Sft::full_shift(2);
  EXPECT_THROW(RoofFunction(LocallyConstantFunction::per_symbol(sft, {1.0, 0.0})), InvalidArgument);
  EXPECT_THROW(RoofFunction(LocallyConstantFunction::per_symbol(sft, {1.0, -2.0})), InvalidArgument);
  EXPECT_THROW(SuspensionFlow(Sft::golden_mean(), RoofFunction(LocallyConstantFunction::constant(sft, 1.0))), InvalidArgument);
}
