#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sflow/potential.hpp"

using namespace sflow;

namespace {

std::vector<Eigen::Matrix2d> bundled_cocycle() {
  Eigen::Matrix2d m0, m1;
  m0 << 2, 1, 1, 1;
  m1 << 1, 1, 1, 2;
  return {m0, m1};
}

MatrixCocycle to_cocycle(const std::vector<Eigen::Matrix2d>& ms) {
  std::vector<Eigen::MatrixXd> xs(ms.begin(), ms.end());
  return MatrixCocycle(xs);
}

// sup over words of length <= n_max, by brute force with closed-form 2x2 norms
double brute_force_constant(const std::vector<Eigen::Matrix2d>& ms, int n_max) {
  const oracle::Matrix01 full{{1, 1}, {1, 1}};
  auto f = [&](const oracle::Word& w) { return std::log(oracle::norm2x2(oracle::product2x2(ms, w))); };
  double sup = 0.0;
  for (int len = 2; len <= n_max; ++len)
    for (const auto& w : oracle::words(full, len))
      for (int m = 1; m < len; ++m) {
        const oracle::Word head(w.begin(), w.begin() + m), tail(w.begin() + m, w.end());
        sup = std::max(sup, std::abs(f(w) - f(head) - f(tail)));
      }
  return sup;
}

}  // namespace

TEST(BirkhoffSum, Examples) {
  const Sft full = Sft::full_shift(2);
  const auto c = LocallyConstantFunction::constant(full, 0.7);
  const Word w{0, 1, 1, 0, 1};
  EXPECT_DOUBLE_EQ(birkhoff_sum(c, w, 4), 4 * 0.7);
  EXPECT_EQ(birkhoff_sum(LocallyConstantFunction::indicator(full, {1}), Word{0, 1, 1, 0}, 4), 2.0);

  const Sft golden = Sft::golden_mean();
  const auto f = LocallyConstantFunction::from(golden, 2, [](std::span<const int> x) {
    if (x[0] == 0 && x[1] == 0) return 1.0;
    if (x[0] == 0 && x[1] == 1) return 2.0;
    return 3.0;
  });
  EXPECT_EQ(birkhoff_sum(f, Word{0, 0, 1, 0, 0}, 3), 6.0);
}

TEST(BirkhoffSum, WordTooShort) {
  const auto f = LocallyConstantFunction::indicator(Sft::full_shift(2), {0, 1});
  EXPECT_THROW(birkhoff_sum(f, Word{0, 1, 0}, 3), InvalidArgument);
  EXPECT_THROW(birkhoff_sum(f, Word{0, 1, 0}, 0), InvalidArgument);
}

TEST(LocallyConstantFunction, TableAndRefinement) {
  const Sft golden = Sft::golden_mean();
  const auto f = LocallyConstantFunction::per_symbol(golden, {0.5, -1.5});
  const auto g = f.refined(3);
  EXPECT_EQ(g.depth(), 3);
  for (const auto& [w, v] : g.table()) EXPECT_EQ(v, w[0] == 0 ? 0.5 : -1.5);
  EXPECT_EQ(g.table().size(), 5u);
  EXPECT_THROW(g.refined(2), InvalidArgument);
  EXPECT_THROW(f(Word{}), InvalidArgument);
  // 11 is not admissible
  EXPECT_THROW(LocallyConstantFunction::indicator(golden, {0, 1})(Word{1, 1}), InvalidArgument);
  EXPECT_EQ(f.min(), -1.5);
  EXPECT_EQ(f.max(), 0.5);
  EXPECT_EQ(f.sup_norm(), 1.5);
  const auto h = 2.0 * f + LocallyConstantFunction::indicator(golden, {0, 1}) + 1.0;
  EXPECT_EQ(h(Word{0, 1}), 3.0);
  EXPECT_EQ(h(Word{1, 0}), -2.0);
}

TEST(LocallyConstantFunction, TooLargeTable) {
  EXPECT_THROW(LocallyConstantFunction::constant(Sft::full_shift(2), 0.0).refined(30), ResourceLimit);
}

TEST(MatrixCocycle, LogNormMatchesClosedForm) {
  const auto ms = bundled_cocycle();
  const auto cocycle = to_cocycle(ms);
  for (const auto& w : oracle::words({{1, 1}, {1, 1}}, 6))
    EXPECT_NEAR(cocycle.log_norm(w), std::log(oracle::norm2x2(oracle::product2x2(ms, w))), 1e-12);
  EXPECT_TRUE(cocycle.entrywise_positive());
}

TEST(MatrixCocycle, QuasiconformalRatio) {
  const MatrixCocycle conformal({2.0 * Eigen::MatrixXd::Identity(2, 2), 3.0 * Eigen::MatrixXd::Identity(2, 2)});
  EXPECT_NEAR(conformal.quasiconformal_ratio(Word{0, 1, 1}), 1.0, 1e-14);
  Eigen::MatrixXd d(2, 2);
  d << 4, 0, 0, 1;
  EXPECT_NEAR(MatrixCocycle({d}).quasiconformal_ratio(Word{0, 0}), 16.0, 1e-12);
}

TEST(MatrixCocycle, Validation) {
  EXPECT_THROW(MatrixCocycle({}), InvalidArgument);
  EXPECT_THROW(MatrixCocycle({Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)}), InvalidArgument);
  EXPECT_THROW(PotentialFamily::from_cocycle(Sft::full_shift(3), to_cocycle(bundled_cocycle())), InvalidArgument);
}

TEST(AlmostAdditivity, AdditiveFamilyIsZero) {
  const auto g = LocallyConstantFunction::from(Sft::golden_mean(), 2, [](std::span<const int> w) { return 0.3 * w[0] - 1.1 * w[1] + 0.2; });
  EXPECT_NEAR(almost_additivity_constant(PotentialFamily::additive(g), 8), 0.0, 1e-12);
}

TEST(AlmostAdditivity, ScalarCocycleIsZero) {
  const MatrixCocycle c({2.0 * Eigen::MatrixXd::Identity(2, 2), 2.0 * Eigen::MatrixXd::Identity(2, 2)});
  EXPECT_NEAR(almost_additivity_constant(PotentialFamily::from_cocycle(Sft::full_shift(2), c), 8), 0.0, 1e-12);
}

TEST(AlmostAdditivity, PositiveCocycleMatchesBruteForce) {
  const auto fam = PotentialFamily::from_cocycle(Sft::full_shift(2), to_cocycle(bundled_cocycle()));
  EXPECT_EQ(fam.kind(), Additivity::AlmostAdditive);
  const double c = almost_additivity_constant(fam, 8);
  EXPECT_NEAR(c, brute_force_constant(bundled_cocycle(), 8), 1e-12);
  EXPECT_GT(c, 0.0);
  EXPECT_TRUE(std::isfinite(c));
}

TEST(AlmostAdditivity, NondecreasingAndStabilizes) {
  // strongly contracting pair: projective contraction ratio below 0.05
  Eigen::MatrixXd m0(2, 2), m1(2, 2);
  m0 << 4, 1, 3, 1;
  m1 << 1, 3, 1, 4;
  const auto fam = PotentialFamily::from_cocycle(Sft::full_shift(2), MatrixCocycle({m0, m1}));
  double previous = 0.0;
  for (int n = 2; n <= 10; ++n) {
    const double c = almost_additivity_constant(fam, n);
    EXPECT_GE(c, previous);
    previous = c;
  }
  EXPECT_LT(std::abs(almost_additivity_constant(fam, 12) - almost_additivity_constant(fam, 10)), 1e-12);
}

TEST(AlmostAdditivity, GeometricSettlingForBundledPair) {
  // increments shrink by roughly (lambda2/lambda1)^2 of [[2,1],[1,1]] every two steps
  const auto fam = PotentialFamily::from_cocycle(Sft::full_shift(2), to_cocycle(bundled_cocycle()));
  const double ratio = std::pow((3.0 - std::sqrt(5.0)) / (3.0 + std::sqrt(5.0)), 2);
  std::vector<double> c;
  for (int n = 4; n <= 12; n += 2) c.push_back(almost_additivity_constant(fam, n));
  for (std::size_t i = 2; i < c.size(); ++i) {
    const double r = (c[i] - c[i - 1]) / (c[i - 1] - c[i - 2]);
    EXPECT_NEAR(r, ratio, 0.2 * ratio);
  }
}

TEST(AlmostAdditivity, RejectsSmallNmax) {
  EXPECT_THROW(almost_additivity_constant(PotentialFamily::constant(Sft::full_shift(2), 1.0), 1), InvalidArgument);
}

TEST(CuneoCandidate, ConstantFamily) {
  const auto xi = cuneo_candidate(PotentialFamily::constant(Sft::full_shift(3), 0.4), 5);
  EXPECT_EQ(xi.depth(), 5);
  EXPECT_NEAR(xi.min(), 0.4, 1e-15);
  EXPECT_NEAR(xi.max(), 0.4, 1e-15);
}

TEST(CuneoCandidate, AdditiveFamilyBoundaryTerms) {
  const Sft golden = Sft::golden_mean();
  const auto g = LocallyConstantFunction::per_symbol(golden, {1.0, -2.0});
  const int n_cand = 4;
  const auto xi = cuneo_candidate(PotentialFamily::additive(g), n_cand);
  for (const auto& [w, v] : xi.table()) EXPECT_NEAR(v, birkhoff_sum(g, w, n_cand) / n_cand, 1e-15);
  // Birkhoff sums of xi reproduce those of g up to 2 N |g|
  for (const auto& w : admissible_words(golden, 14)) EXPECT_LE(std::abs(birkhoff_sum(xi, w, 11) - birkhoff_sum(g, w, 11)), 2.0 * n_cand * 2.0);
}

TEST(CuneoCandidate, CocycleTable) {
  const auto ms = bundled_cocycle();
  const auto xi = cuneo_candidate(PotentialFamily::from_cocycle(Sft::full_shift(2), to_cocycle(ms)), 6);
  const auto table = xi.table();
  ASSERT_EQ(table.size(), 64u);
  for (const auto& [w, v] : table) EXPECT_NEAR(v, std::log(oracle::norm2x2(oracle::product2x2(ms, w))) / 6.0, 1e-13);
}

TEST(EquivalenceDefect, OwnGeneratorIsZero) {
  const auto g = LocallyConstantFunction::from(Sft::full_shift(2), 2, [](std::span<const int> w) { return w[0] - 0.5 * w[1] + 0.25; });
  const auto fam = PotentialFamily::additive(g);
  for (int n = 2; n <= 12; ++n) EXPECT_EQ(equivalence_defect(fam, g, n), 0.0);
}

TEST(EquivalenceDefect, Constants) {
  const Sft sft = Sft::golden_mean();
  EXPECT_NEAR(equivalence_defect(PotentialFamily::constant(sft, 1.25), LocallyConstantFunction::constant(sft, 0.5), 7), 0.75, 1e-14);
}

TEST(EquivalenceDefect, SingleMatrixCocycle) {
  Eigen::Matrix2d m;
  // non-normal, so ||M^n|| / rho^n tends to a constant above one
  m << 2, 3, 1, 1;
  const MatrixCocycle c({Eigen::MatrixXd(m), Eigen::MatrixXd(m)});
  const auto fam = PotentialFamily::from_cocycle(Sft::full_shift(2), c);
  const double log_rho = std::log(spectral_radius(m));
  EXPECT_NEAR(log_rho, std::log((3.0 + std::sqrt(13.0)) / 2.0), 1e-13);
  const auto g = LocallyConstantFunction::constant(Sft::full_shift(2), log_rho);
  double previous = INFINITY;
  for (int n = 1; n <= 12; ++n) {
    Eigen::Matrix2d p = Eigen::Matrix2d::Identity();
    for (int i = 0; i < n; ++i) p = m * p;
    const double expected = std::abs(std::log(oracle::norm2x2(p)) - n * log_rho) / n;
    const double d = equivalence_defect(fam, g, n);
    EXPECT_NEAR(d, expected, 1e-12);
    EXPECT_LT(d, previous);
    previous = d;
  }
}

TEST(EquivalenceDefect, ResourceLimit) {
  const auto fam = PotentialFamily::constant(Sft::full_shift(2), 1.0);
  EXPECT_THROW(equivalence_defect(fam, LocallyConstantFunction::constant(Sft::full_shift(2), 1.0), 24), ResourceLimit);
}

TEST(EquivalenceDefect, SampledIsLowerBound) {
  const Sft full = Sft::full_shift(2);
  const auto fam = PotentialFamily::from_cocycle(full, to_cocycle(bundled_cocycle()));
  const auto xi = cuneo_candidate(fam, 3);
  const auto samples = periodic_samples(full, 6);
  for (int n = 3; n <= 10; ++n) EXPECT_LE(equivalence_defect_on(fam, xi, n, samples), equivalence_defect(fam, xi, n) + 1e-15);
}

TEST(EquivalenceDefect, LargerCandidateDepthShrinksDefect) {
  // bundled cocycle examples; the (8, 64) defect is beyond exhaustive enumeration,
  // so both sides use the same periodic sample set
  std::vector<std::vector<Eigen::Matrix2d>> examples{bundled_cocycle()};
  Eigen::Matrix2d a, b;
  a << 3, 1, 2, 1;
  b << 1, 2, 1, 4;
  examples.push_back({a, b});
  a << 1, 0.5, 0.5, 2;
  b << 2, 0.3, 1, 1;
  examples.push_back({a, b});
  const Sft full = Sft::full_shift(2);
  const auto samples = periodic_samples(full, 10);
  for (const auto& ms : examples) {
    const auto fam = PotentialFamily::from_cocycle(full, to_cocycle(ms));
    const double coarse = equivalence_defect_on(fam, cuneo_candidate(fam, 2), 16, samples);
    const double fine = equivalence_defect_on(fam, cuneo_candidate(fam, 8), 64, samples);
    EXPECT_LT(fine, coarse);
  }
}

TEST(FamilyMetadata, Kinds) {
  const Sft sft = Sft::full_shift(2);
  EXPECT_EQ(PotentialFamily::constant(sft, 1.0).kind(), Additivity::Additive);
  EXPECT_EQ(PotentialFamily::constant(sft, 1.0).claimed_constant(), 0.0);
  Eigen::MatrixXd rot(2, 2);
  rot << 0, -1, 1, 0;
  EXPECT_EQ(PotentialFamily::from_cocycle(sft, MatrixCocycle({rot, rot})).kind(), Additivity::Asymptotic);
  EXPECT_STREQ(to_string(Additivity::AlmostAdditive), "almost-additive");
  EXPECT_THROW(PotentialFamily::almost_additive(sft, [](std::span<const int>, int) { return 0.0; }, 0, -1.0), InvalidArgument);
}
