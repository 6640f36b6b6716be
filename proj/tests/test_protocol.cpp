#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pmarket/errors.hpp"
#include "pmarket/forecast.hpp"
#include "pmarket/protocol.hpp"
#include "pmarket/random_models.hpp"

using namespace pmarket;

namespace {

Posterior binary(Rational p) { return {Rational(1) - p, p}; }

// Swaps the two experts of a model.
FiniteModel swapped(const FiniteModel& m) {
  auto experts = m.experts();
  std::swap(experts[0], experts[1]);
  return FiniteModel(m.table(), m.target_name(), experts);
}

}  // namespace

TEST(Classify, TaxonomyOnFiniteForecasts) {
  EXPECT_EQ(classify(binary(Rational(1, 2)), binary(Rational(1, 2)), binary(Rational(1)),
                     CompareMode::exact),
            Classification::vacuous);
  EXPECT_EQ(classify(binary(Rational(4, 7)), binary(Rational(1, 2)), binary(Rational(4, 7)),
                     CompareMode::exact),
            Classification::complete);
  EXPECT_EQ(classify(binary(Rational(3, 5)), binary(Rational(1, 2)), binary(Rational(4, 7)),
                     CompareMode::exact),
            Classification::limited);
}

TEST(Classify, CompleteWinsWhenPooledEqualsPrior) {
  const Posterior half = binary(Rational(1, 2));
  EXPECT_EQ(classify(half, half, half, CompareMode::exact), Classification::complete);
}

TEST(Classify, FiniteIgnoresTolerance) {
  const Posterior a = binary(Rational(1, 2));
  const Posterior b = binary(Rational(1, 2) + Rational(1, 1000000000000LL));
  EXPECT_EQ(classify(b, a, binary(Rational(1)), CompareMode::tolerance, 1.0),
            Classification::limited);
}

TEST(Classify, ContinuousUsesDistance) {
  const GaussianMixture limit({{0.5, GaussianDist(0.5, 0.5)}, {0.5, GaussianDist(-0.5, 0.5)}});
  EXPECT_EQ(classify(limit, GaussianDist(0, 1), GaussianDist(0.5, 0.5), CompareMode::tolerance),
            Classification::limited);
  EXPECT_EQ(classify(GaussianDist(1, 2), GaussianDist(0, 1), GaussianDist(1 + 1e-10, 2),
                     CompareMode::tolerance),
            Classification::complete);
  EXPECT_THROW(classify(binary(Rational(1, 2)), GaussianDist(0, 1), GaussianDist(0, 1),
                        CompareMode::tolerance),
               KindMismatch);
}

TEST(ForecastDistance, MixturesMergeCoincidentComponents) {
  const GaussianMixture twin({{0.5, GaussianDist(0, 0.5)}, {0.5, GaussianDist(0, 0.5)}});
  EXPECT_EQ(forecast_distance(twin, GaussianDist(0, 0.5)), 0.0);
  const GaussianMixture a({{0.7, GaussianDist(1, 1)}, {0.3, GaussianDist(-1, 1)}});
  const GaussianMixture b({{0.3, GaussianDist(-1, 1)}, {0.7, GaussianDist(1, 1)}});
  EXPECT_EQ(forecast_distance(a, b), 0.0);
  EXPECT_TRUE(std::isinf(forecast_distance(a, GaussianDist(0, 1))));
  EXPECT_NEAR(forecast_distance(GaussianDist(0, 1), GaussianDist(0.1, 4)), 1.0, 1e-15);
}

TEST(MartingaleExact, ParityAndBernoulli) {
  EXPECT_TRUE(martingale_check_exact(build_parity_model(), Schedule::round_robin(2), 4));
  EXPECT_TRUE(martingale_check_exact(build_overlapping_bernoulli(1, 1, 1), Schedule::round_robin(2), 4));
  EXPECT_TRUE(martingale_check_exact(build_overlapping_bernoulli(2, 2, 1), Schedule({1, 0}), 6));
}

TEST(MartingaleExact, AgreesWithNaiveEnumerator) {
  const auto m = build_overlapping_bernoulli(1, 1, 1);
  EXPECT_TRUE(oracle::naive_martingale(m, oracle::naive_market(m, {0, 1}, 4)));
  Rng rng = stream_for(8, 0);
  for (int i = 0; i < 30; ++i) {
    const auto r = random_finite_model(rng, {4, 3, 200});
    EXPECT_EQ(martingale_check_exact(r, Schedule::round_robin(2), 5),
              oracle::naive_martingale(r, oracle::naive_market(r, {0, 1}, 5)));
  }
}

TEST(MartingaleExact, PerturbedRuleIsCaught) {
  const auto m = build_overlapping_bernoulli(1, 1, 1);
  const ForecastRule biased = [](const FiniteModel& model, const PublicEvent& pub,
                                 std::size_t expert) {
    auto map = forecast_function(model, pub, expert);
    for (auto& [h, p] : map) {
      if (h == 0) {
        p[1] += Rational(1, 100);
        p[0] -= Rational(1, 100);
      }
    }
    return map;
  };
  EXPECT_FALSE(martingale_check_exact(m, Schedule::round_robin(2), 4, biased));
}

TEST(Vacuity, PublishedCases) {
  const auto parity = vacuity_criterion(build_parity_model());
  EXPECT_TRUE(parity.predicted);
  EXPECT_TRUE(parity.observed);
  const auto bern = vacuity_criterion(build_overlapping_bernoulli(2, 2, 1));
  EXPECT_FALSE(bern.predicted);
  EXPECT_FALSE(bern.observed);
}

TEST(Vacuity, InformativeFirstExpertConstantSecond) {
  const FiniteModel m(OutcomeTable::normalized({{"H1", {0, 1}}, {"H2", {0}}, {"A", {0, 1}}},
                                               {{{0, 0, 0}, Rational(3)},
                                                {{0, 0, 1}, Rational(1)},
                                                {{1, 0, 0}, Rational(1)},
                                                {{1, 0, 1}, Rational(3)}}),
                      "A", {{"H1", std::nullopt}, {"H2", std::nullopt}});
  const auto r = vacuity_criterion(m);
  EXPECT_FALSE(r.predicted);
  EXPECT_FALSE(r.observed);
}

TEST(Vacuity, IndependentFamilyIsVacuous) {
  Rng rng = stream_for(12, 0);
  int jointly_informative = 0;
  for (int i = 0; i < 40; ++i) {
    const auto m = random_independent_model(rng);
    EXPECT_TRUE(marginally_independent(m, 0));
    EXPECT_TRUE(marginally_independent(m, 1));
    const auto r = vacuity_criterion(m);
    EXPECT_TRUE(r.predicted);
    EXPECT_TRUE(r.observed);
    for (const auto& real : distinct_private_realizations(m)) {
      if (pooled_forecast(m, real) != m.prior()) {
        ++jointly_informative;
        break;
      }
    }
  }
  // The family is not trivially independent: the pair usually informs.
  EXPECT_GE(jointly_informative, 10);
}

TEST(Vacuity, RandomModelsAgree) {
  Rng rng = stream_for(12, 1);
  for (int i = 0; i < 100; ++i) {
    const auto r = vacuity_criterion(random_finite_model(rng));
    EXPECT_EQ(r.predicted, r.observed);
  }
}

TEST(Reports, FiniteClassification) {
  const auto parity = build_parity_model();
  const auto real = parity.table().atoms()[1].assignment;
  const auto rp = finite_report(parity, real, Schedule::round_robin(2));
  EXPECT_EQ(rp.classification, Classification::vacuous);
  EXPECT_EQ(rp.rounds, 1u);
  const auto bern = build_overlapping_bernoulli(2, 2, 2);
  const auto rb = finite_report(bern, bern.table().atoms()[7].assignment, Schedule::round_robin(2));
  EXPECT_EQ(rb.classification, Classification::complete);
  EXPECT_EQ(rb.mode, CompareMode::exact);
}

TEST(Reports, ClassificationInvariantUnderRelabeling) {
  Rng rng = stream_for(13, 0);
  for (int i = 0; i < 30; ++i) {
    const auto m = random_finite_model(rng);
    const auto s = swapped(m);
    for (const auto& real : distinct_private_realizations(m)) {
      const auto a = finite_report(m, real, Schedule({0, 1}));
      const auto b = finite_report(s, real, Schedule({1, 0}));
      EXPECT_EQ(a.classification, b.classification);
      EXPECT_EQ(std::get<Posterior>(a.limit), std::get<Posterior>(b.limit));
    }
  }
}

TEST(OrderExperiment, ParityIsSymmetric) {
  const auto m = build_parity_model();
  const auto reports = order_experiment(m, m.table().atoms()[2].assignment,
                                        {Schedule({0, 1}), Schedule({1, 0})});
  ASSERT_EQ(reports.size(), 2u);
  for (const auto& r : reports) EXPECT_EQ(r.classification, Classification::vacuous);
  EXPECT_EQ(std::get<Posterior>(reports[0].limit), std::get<Posterior>(reports[1].limit));
}

TEST(OrderExperiment, TsModelOrderIrrelevant) {
  const auto reports = order_experiment(0.9, -1.4, 0.0, {1, 2});
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_LT(forecast_distance(reports[0].limit, reports[1].limit), 1e-12);
}

TEST(OrderExperiment, SomeFiniteModelIsOrderSensitive) {
  bool found = false;
  for (std::uint64_t i = 0; i < 2000 && !found; ++i) {
    Rng rng = stream_for(21, i);
    const auto m = random_finite_model(rng, {3, 2, 200});
    for (const auto& real : distinct_private_realizations(m)) {
      const auto r = order_experiment(m, real, {Schedule({0, 1}), Schedule({1, 0})});
      if (std::get<Posterior>(r[0].limit) != std::get<Posterior>(r[1].limit)) {
        found = true;
        break;
      }
    }
  }
  EXPECT_TRUE(found);
}

TEST(MartingaleMonteCarlo, LinearMarketPasses) {
  Rng rng = stream_for(30, 0);
  const auto model = random_gaussian_model(rng, 2, 3);
  const auto r = martingale_check_monte_carlo(model, 4000, 77);
  EXPECT_TRUE(r.passed) << "worst z " << r.worst_z;
  EXPECT_GT(r.bins_checked, 0u);
  EXPECT_EQ(r.draws, 4000u);
  // A zero threshold cannot be met: the harness does test something.
  EXPECT_FALSE(martingale_check_monte_carlo(model, 4000, 77, 5, 0.0).passed);
}
