#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "near_misses/bootstrap.hpp"
#include "near_misses/error.hpp"

using namespace near_misses;

namespace {
Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}
}  // namespace

TEST(BetaStep, Examples) {
  EXPECT_EQ(beta_step(3, Rational(3)), frac(5, 2));
  EXPECT_EQ(beta_step(4, frac(17, 5)), frac(61, 19));
  for (int n = 2; n <= 10; ++n) EXPECT_EQ(beta_step(n, Rational(n)), Rational(n - 1) + frac(2, n + 1)) << n;
}

TEST(BetaStep, DomainError) {
  EXPECT_THROW(beta_step(4, Rational(3)), DomainError);
  EXPECT_THROW(beta_step(4, frac(5, 2)), DomainError);
}

TEST(BetaStep, TransformedRecursionOnRandomRationals) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(1, 100'000);
  std::uniform_int_distribution<int> dim(3, 12);
  for (int i = 0; i < 100; ++i) {
    const int n = dim(rng);
    Rational x = Rational(n - 1) + frac(num(rng), num(rng));
    x.canonicalize();
    const Rational lhs = beta_step(n, x) - (n - 1);
    const Rational rhs = (x - (n - 1)) / (x - frac(n - 1, 2));
    EXPECT_EQ(lhs, rhs) << "n=" << n << " x=" << x.get_str();
  }
}

TEST(ExponentSequence, ClosedFormForThree) {
  const ExponentSequence s = exponent_sequence(3, 10'000);
  ASSERT_EQ(s.betas.size(), 10'000u);
  for (std::size_t i = 1; i <= 10'000; ++i) ASSERT_EQ(s.beta(i), Rational(2) + frac(1, static_cast<long>(i)));
}

TEST(ExponentSequence, FourExample) {
  const ExponentSequence s = exponent_sequence(4, 3);
  EXPECT_EQ(s.beta(1), Rational(4));
  EXPECT_EQ(s.beta(2), frac(17, 5));
  EXPECT_EQ(s.beta(3), frac(61, 19));
}

TEST(ExponentSequence, ContractionForHigherDimensions) {
  for (int n = 4; n <= 8; ++n) {
    const ExponentSequence s = exponent_sequence(n, 60);
    for (std::size_t i = 2; i <= 60; ++i) {
      const Rational gap = s.beta(i) - (n - 1);
      const Rational prev = s.beta(i - 1) - (n - 1);
      ASSERT_GT(gap, 0);
      ASSERT_LT(gap, prev);
      ASSERT_LE(gap / prev, frac(2, n - 1));
    }
  }
}

TEST(Schedule, Examples) {
  EXPECT_EQ(iteration_schedule(3, std::exp(16.0)), 4);
  EXPECT_EQ(iteration_schedule_log(4, std::exp(2.0)), 4);
  EXPECT_EQ(iteration_schedule(3, 1e6), 3);
  EXPECT_THROW(iteration_schedule(3, 2.0), InvalidQuery);
}

TEST(ErrorTerm, ShapeBetweenPowers) {
  std::vector<double> grid;
  for (double q = 1e3; q <= 1e12; q *= 10.0) grid.push_back(q);
  for (int n : {2, 3, 4, 6}) {
    ErrorTermModel m;
    m.n = n;
    EXPECT_TRUE(error_term_shape_holds(m, grid)) << n;
  }
}

TEST(ErrorTerm, FitRecoversKappa) {
  std::vector<double> qs;
  std::vector<double> ex;
  for (double q = 100.0; q <= 1e5; q *= 2.0) {
    qs.push_back(q);
    ex.push_back(q * q * q * std::pow(std::log(q), 1.7));
  }
  const ErrorTermModel m = fit_error_term(4, qs, ex);
  EXPECT_NEAR(m.kappa, 1.7, 1e-9);
}

TEST(PredictedBound, ZeroDeltaAndMainTermDominance) {
  const ErrorTermModel model;
  const ExponentSequence s3 = exponent_sequence(3, 50);
  const PredictedBound p0 = predicted_bound(3, 1e4, 0.0, model, s3);
  double best = 1e300;
  for (double v : p0.per_i) best = std::min(best, v);
  EXPECT_DOUBLE_EQ(p0.envelope, best);
  const PredictedBound p1 = predicted_bound(3, 1e4, 0.1, model, s3);
  EXPECT_GT(0.1 * 1e12, p1.terminal - 0.1 * 1e12);
}

TEST(PredictedBound, EnvelopeExponentTendsToNMinusOne) {
  const ExponentSequence s = exponent_sequence(4, 400);
  EXPECT_LT(std::abs(s.beta(400).get_d() - 3.0), 1e-6);
}
