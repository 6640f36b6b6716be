#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pmarket/distributions.hpp"
#include "pmarket/errors.hpp"
#include "pmarket/finite_engine.hpp"
#include "pmarket/outcome_table.hpp"
#include "pmarket/rational.hpp"

using namespace pmarket;

namespace {

OutcomeTable two_coins() {
  return OutcomeTable({{"X1", {0, 1}}, {"X2", {0, 1}}},
                      {{{0, 0}, Rational(1, 4)},
                       {{0, 1}, Rational(1, 4)},
                       {{1, 0}, Rational(1, 4)},
                       {{1, 1}, Rational(1, 4)}});
}

}  // namespace

TEST(Rational, NormalizesToLowestTerms) {
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  EXPECT_EQ(Rational(2, 4).str(), "1/2");
  EXPECT_EQ(Rational(3, -6).str(), "-1/2");
  EXPECT_EQ(Rational(5).str(), "5/1");
  EXPECT_EQ(Rational().str(), "0/1");
}

TEST(Rational, ParsesAndRoundTrips) {
  EXPECT_EQ(Rational::parse("6/8"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_EQ(Rational::parse(Rational(-5, 12).str()), Rational(-5, 12));
  EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
  EXPECT_THROW(Rational::parse("abc"), std::invalid_argument);
}

TEST(Rational, Arithmetic) {
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(1, 3) * Rational(3, 7), Rational(1, 7));
  EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, FactorialAndBinomialAgreeWithPascal) {
  EXPECT_EQ(factorial(0), 1);
  EXPECT_EQ(factorial(10), 3628800);
  for (unsigned n = 0; n <= 12; ++n) {
    for (unsigned k = 0; k <= n + 1; ++k) EXPECT_EQ(binomial(n, k), oracle::choose(n, k));
  }
}

TEST(Gaussian, RejectsNonPositiveVariance) {
  EXPECT_THROW(GaussianDist(0.0, 0.0), InvalidModel);
  EXPECT_THROW(GaussianDist(0.0, -1.0), InvalidModel);
  EXPECT_DOUBLE_EQ(GaussianDist(1.0, 4.0).sd(), 2.0);
}

TEST(Mixture, WeightsMustSumToOne) {
  EXPECT_THROW(GaussianMixture({{0.5, GaussianDist(0, 1)}, {0.4, GaussianDist(1, 1)}}),
               InvalidModel);
  EXPECT_THROW(GaussianMixture({{1.5, GaussianDist(0, 1)}, {-0.5, GaussianDist(1, 1)}}),
               InvalidModel);
}

TEST(Mixture, MeanVarSingleComponent) {
  const auto [m, v] = mixture_mean_var(GaussianMixture(GaussianDist(3, 2)));
  EXPECT_DOUBLE_EQ(m, 3.0);
  EXPECT_DOUBLE_EQ(v, 2.0);
}

TEST(Mixture, MeanVarSymmetricPairMatchesSampling) {
  const GaussianMixture mix({{0.5, GaussianDist(0.5, 0.5)}, {0.5, GaussianDist(-0.5, 0.5)}});
  const auto [m, v] = mixture_mean_var(mix);
  EXPECT_NEAR(m, 0.0, 1e-15);
  EXPECT_NEAR(v, 0.75, 1e-15);

  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const int n = 400000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = (coin(rng) ? 0.5 : -0.5) + normal(rng);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  EXPECT_NEAR(mean, m, 4 * std::sqrt(0.75 / n));
  // Var of the sample variance is (E x^4 - v^2) / n, with E x^4 = 1.5625 here.
  EXPECT_NEAR(var, v, 4 * std::sqrt((1.5625 - v * v) / n));
}

TEST(Mixture, MeanVarShiftedPair) {
  for (double c : {0.1, 1.0, 3.0}) {
    for (double var : {0.2, 1.0}) {
      const auto [m, v] = mixture_mean_var(
          GaussianMixture({{0.5, GaussianDist(c, var)}, {0.5, GaussianDist(-c, var)}}));
      EXPECT_NEAR(m, 0.0, 1e-15);
      EXPECT_NEAR(v, var + c * c, 1e-12);
    }
  }
}

TEST(OutcomeTable, ValidatesWeightsAndAssignments) {
  EXPECT_THROW(OutcomeTable({{"X", {0, 1}}}, {{{0}, Rational(1, 2)}}), InvalidModel);
  EXPECT_THROW(OutcomeTable({{"X", {0, 1}}}, {{{0}, Rational(1, 2)}, {{0}, Rational(1, 2)}}),
               InvalidModel);
  EXPECT_THROW(OutcomeTable({{"X", {0, 1}}}, {{{2}, Rational(1)}}), InvalidModel);
  EXPECT_THROW(OutcomeTable({{"X", {0, 1}}}, {{{0}, Rational(3, 2)}, {{1}, Rational(-1, 2)}}),
               InvalidModel);
  const OutcomeTable sparse({{"X", {0, 1}}}, {{{0}, Rational(1)}, {{1}, Rational(0)}});
  EXPECT_EQ(sparse.size(), 1u);
}

TEST(OutcomeTable, NormalizedDividesByTotal) {
  const auto t = OutcomeTable::normalized({{"X", {0, 1, 2}}},
                                          {{{0}, Rational(1)}, {{1}, Rational(2)}, {{2}, Rational(3)}});
  EXPECT_EQ(marginal_prob(t, equals(t, "X", 2)), Rational(1, 2));
}

TEST(Condition, IndependenceIsPreserved) {
  const auto t = two_coins();
  const auto c = condition(t, equals(t, "X1", 1));
  EXPECT_EQ(marginal_prob(c, equals(c, "X2", 1)), Rational(1, 2));
  EXPECT_EQ(marginal_prob(c, equals(c, "X1", 1)), Rational(1));
}

TEST(Condition, ParityForecastUnchanged) {
  const auto model = build_parity_model();
  const auto& t = model.table();
  const auto c = condition(t, equals(t, "X1", 1));
  EXPECT_EQ(marginal_prob(c, equals(c, "A", 1)), Rational(1, 2));
}

TEST(Condition, AlwaysTrueIsIdentity) {
  const auto t = build_overlapping_bernoulli(1, 2, 1).table();
  EXPECT_EQ(condition(t, [](const Assignment&) { return true; }), t);
}

TEST(Condition, ZeroProbabilityThrows) {
  const auto t = two_coins();
  EXPECT_THROW(condition(t, [](const Assignment&) { return false; }), ZeroProbabilityEvent);
}

TEST(Condition, Idempotent) {
  const auto t = build_overlapping_bernoulli(2, 1, 1).table();
  const auto e = equals(t, "X1", 2);
  const auto once = condition(t, e);
  EXPECT_EQ(condition(once, e), once);
}

TEST(Condition, LawOfTotalProbability) {
  const auto t = build_overlapping_bernoulli(2, 2, 1).table();
  const auto a = equals(t, "A", 1);
  Rational total;
  for (int x1 = 0; x1 <= 4; ++x1) {
    const auto e = equals(t, "X1", x1);
    total += marginal_prob(t, e) * marginal_prob(condition(t, e), a);
  }
  EXPECT_EQ(total, marginal_prob(t, a));
}

TEST(MarginalProb, ParityAndEmptyEvent) {
  const auto t = build_parity_model().table();
  EXPECT_EQ(marginal_prob(t, equals(t, "A", 1)), Rational(1, 2));
  EXPECT_EQ(marginal_prob(t, [](const Assignment&) { return false; }), Rational(0));
}

TEST(MarginalProb, SymmetricBernoulliMatchesEnumeration) {
  const auto t = build_overlapping_bernoulli(1, 1, 1).table();
  EXPECT_EQ(marginal_prob(t, equals(t, "A", 1)), Rational(1, 2));
  // Enumeration oracle: P(A=1) = sum over all (y0,y1,y2) of C(..) B(s+1+1, ...).
  mpq_class p = 0;
  for (unsigned y0 = 0; y0 <= 1; ++y0)
    for (unsigned y1 = 0; y1 <= 1; ++y1)
      for (unsigned y2 = 0; y2 <= 1; ++y2) {
        const unsigned s = y0 + y1 + y2 + 1;
        p += oracle::beta_moment(s, 4 - s);
      }
  EXPECT_EQ(Rational(p), Rational(1, 2));
}
