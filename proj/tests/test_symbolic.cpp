#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "sflow/symbolic.hpp"

using namespace sflow;

namespace {

std::vector<oracle::Matrix01> test_matrices() {
  return {
      {{1, 1}, {1, 1}},
      {{1, 1}, {1, 0}},
      {{1}},
      {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}},
      {{0, 1, 1}, {1, 0, 1}, {1, 1, 1}},
      {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 0, 0}},
  };
}

}  // namespace

TEST(AdmissibleWords, FullTwoShiftLengthTwo) {
  const auto ws = admissible_words(Sft::full_shift(2), 2);
  EXPECT_EQ(ws, (std::vector<Word>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(AdmissibleWords, GoldenMeanLengthThree) {
  const auto ws = admissible_words(Sft::golden_mean(), 3);
  EXPECT_EQ(ws, (std::vector<Word>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 0, 1}}));
}

TEST(AdmissibleWords, SingleSelfLoop) {
  const auto ws = admissible_words(Sft(std::vector<std::vector<int>>{{1}}), 7);
  ASSERT_EQ(ws.size(), 1u);
  EXPECT_EQ(ws[0], Word(7, 0));
}

TEST(AdmissibleWords, ZeroLengthRejected) {
  EXPECT_THROW(admissible_words(Sft::full_shift(2), 0), InvalidArgument);
  EXPECT_THROW(periodic_points(Sft::full_shift(2), 0), InvalidArgument);
}

TEST(AdmissibleWords, MatchBruteForceAndMatrixPowers) {
  for (const auto& a : test_matrices()) {
    const Sft sft(a);
    for (int n = 1; n <= 8; ++n) {
      const auto ws = admissible_words(sft, n);
      EXPECT_EQ(ws, oracle::words(a, n)) << "n=" << n;
      EXPECT_EQ(static_cast<long long>(ws.size()), oracle::entry_sum(oracle::power(a, n - 1)));
      EXPECT_EQ(count_words(sft, n), static_cast<double>(ws.size()));
      EXPECT_TRUE(std::is_sorted(ws.begin(), ws.end()));
      EXPECT_EQ(std::adjacent_find(ws.begin(), ws.end()), ws.end());
    }
  }
}

TEST(PeriodicPoints, Examples) {
  EXPECT_EQ(periodic_points(Sft::full_shift(2), 2).size(), 4u);
  EXPECT_EQ(periodic_points(Sft::golden_mean(), 3).size(), 4u);
  EXPECT_EQ(periodic_points(Sft(std::vector<std::vector<int>>{{1}}), 5).size(), 1u);
}

TEST(PeriodicPoints, CountEqualsTrace) {
  for (const auto& a : test_matrices()) {
    const Sft sft(a);
    for (int n = 1; n <= 8; ++n) EXPECT_EQ(static_cast<long long>(periodic_points(sft, n).size()), oracle::trace(oracle::power(a, n)));
  }
}

TEST(PeriodicPoints, MinimalPeriodDividesLength) {
  for (const auto& p : periodic_points(Sft::full_shift(2), 6)) {
    EXPECT_EQ(p.length() % p.minimal_period(), 0);
    for (int i = 0; i < 12; ++i) EXPECT_EQ(p.at(i), p.at(i + p.minimal_period()));
  }
  EXPECT_EQ(PeriodicPoint(Sft::full_shift(2), {0, 1, 0, 1}).minimal_period(), 2);
  EXPECT_EQ(PeriodicPoint(Sft::full_shift(2), {0, 0, 1}).minimal_period(), 3);
}

TEST(PeriodicPoints, RejectsInadmissibleCycles) {
  EXPECT_THROW(PeriodicPoint(Sft::golden_mean(), {1, 1}), InvalidArgument);
  // closing transition 1 -> 1 is forbidden
  EXPECT_THROW(PeriodicPoint(Sft::golden_mean(), {1, 0, 1}), InvalidArgument);
  EXPECT_THROW(PeriodicPoint(Sft::golden_mean(), {}), InvalidArgument);
}

TEST(DBeta, Examples) {
  const Sft full = Sft::full_shift(2);
  const PeriodicPoint zero(full, {0}), one(full, {1});
  EXPECT_EQ(d_beta(zero, zero, 2.0), 0.0);
  EXPECT_EQ(d_beta(zero, one, 2.0), 1.0);

  // unroll both sequences over two common periods in both directions
  const PeriodicPoint x(full, {0, 1}), y(full, {0, 0, 1, 1});
  int first = -1;
  for (int n = 0; n < 16 && first < 0; ++n) {
    const int xn = n % 2 == 0 ? 0 : 1;
    const int yn = (n % 4) < 2 ? 0 : 1;
    const int xm = ((-n % 2) + 2) % 2 == 0 ? 0 : 1;
    const int ym = (((-n % 4) + 4) % 4) < 2 ? 0 : 1;
    if (xn != yn || xm != ym) first = n;
  }
  ASSERT_GE(first, 0);
  EXPECT_DOUBLE_EQ(d_beta(x, y, 2.0), std::pow(2.0, -first));
}

TEST(DBeta, Errors) {
  const PeriodicPoint a(Sft::full_shift(2), {0}), b(Sft::full_shift(3), {0});
  EXPECT_THROW(d_beta(a, b, 2.0), InvalidArgument);
  EXPECT_THROW(d_beta(a, a, 1.0), InvalidArgument);
}

TEST(DBeta, SymmetricUltrametric) {
  const Sft sft = Sft::full_shift(2);
  std::vector<PeriodicPoint> pts;
  for (int p = 1; p <= 4; ++p)
    for (const auto& x : periodic_points(sft, p)) pts.push_back(x);
  int violations = 0;
  for (const auto& x : pts)
    for (const auto& y : pts) {
      if (d_beta(x, y, 3.0) != d_beta(y, x, 3.0)) ++violations;
      for (const auto& z : pts)
        if (d_beta(x, z, 3.0) > std::max(d_beta(x, y, 3.0), d_beta(y, z, 3.0)) * (1 + 1e-15)) ++violations;
    }
  EXPECT_EQ(violations, 0);
}

TEST(Sft, Validation) {
  EXPECT_THROW(Sft(std::vector<std::vector<int>>{}), InvalidArgument);
  EXPECT_THROW(Sft({{1, 1}}), InvalidArgument);
  EXPECT_THROW(Sft({{1, 2}, {1, 1}}), InvalidArgument);
  EXPECT_THROW(Sft({{1, 1}, {0, 0}}), InvalidArgument);
  EXPECT_THROW(Sft({{1, 0}, {1, 0}}), InvalidArgument);
}

TEST(Sft, Primitivity) {
  EXPECT_TRUE(Sft::full_shift(3).primitive());
  EXPECT_EQ(Sft::full_shift(3).primitive_exponent(), 1);
  EXPECT_EQ(Sft::golden_mean().primitive_exponent(), 2);
  EXPECT_FALSE(Sft({{0, 1}, {1, 0}}).primitive());
  EXPECT_FALSE(Sft({{1, 0}, {0, 1}}).primitive());
  // Wielandt's matrix attains the bound k^2 - 2k + 2
  const Sft wielandt({{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 0, 0}});
  EXPECT_EQ(wielandt.primitive_exponent(), 10);
}

TEST(Sft, PrimitiveExponentMatchesBooleanPowers) {
  for (const auto& a : test_matrices()) {
    const Sft sft(a);
    int first = 0;
    for (int m = 1; m <= 20 && !first; ++m) {
      const auto p = oracle::power(a, m);
      bool pos = true;
      for (const auto& r : p)
        for (int v : r) pos = pos && v > 0;
      if (pos) first = m;
    }
    EXPECT_EQ(sft.primitive_exponent(), first);
  }
}
