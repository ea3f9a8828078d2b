#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "near_misses/error.hpp"
#include "near_misses/experiments.hpp"

using namespace near_misses;

TEST(RobertSargos, MatchesBruteForce) {
  for (std::int64_t M : {2, 3, 7, 20, 41, 60}) {
    for (double alpha : {1.5, 0.5, 2.5}) {
      for (double delta : {0.0, 0.01, 0.3, 2.0}) {
        ASSERT_EQ(robert_sargos_count(M, delta, alpha), robert_sargos_bruteforce(M, delta, alpha))
            << M << " " << alpha << " " << delta;
      }
    }
  }
}

TEST(RobertSargos, FullBoxAndDiagonal) {
  EXPECT_EQ(robert_sargos_count(30, 1e9, 1.5), 30LL * 30 * 30 * 30);
  for (std::int64_t M : {10, 50, 200}) EXPECT_GE(robert_sargos_count(M, 0.0, 1.5), 2 * M * M - M);
  EXPECT_THROW(robert_sargos_count(100'001, 0.1, 1.5), BudgetError);
  EXPECT_THROW(robert_sargos_count(1, 0.1, 1.5), InvalidQuery);
}

TEST(RobertSargos, LinearRegimeInDelta) {
  // Far above the diagonal floor the count scales like delta M^3.
  const double a = static_cast<double>(robert_sargos_count(200, 0.05, 1.5));
  const double b = static_cast<double>(robert_sargos_count(200, 0.1, 1.5));
  EXPECT_GT(b / a, 1.6);
  EXPECT_LT(b / a, 2.4);
}

TEST(GrowthExponent, Examples) {
  std::vector<double> x;
  std::vector<double> sq;
  std::vector<double> sqlog;
  for (double v = 100.0; v <= 1e4; v *= 2.0) {
    x.push_back(v);
    sq.push_back(v * v);
    sqlog.push_back(v * v * std::log(v));
  }
  const GrowthEstimate e = growth_exponent(x, sq);
  EXPECT_NEAR(e.slope, 2.0, 1e-12);
  EXPECT_NEAR(e.stderr_, 0.0, 1e-10);
  const GrowthEstimate l = growth_exponent(x, sqlog);
  EXPECT_GT(l.slope, 2.0);
  EXPECT_LT(l.slope, 2.2);
  EXPECT_THROW(growth_exponent({1, 2, 3}, {1, 2, 3}), InvalidQuery);
  EXPECT_THROW(growth_exponent({1, 3, 2, 4}, {1, 2, 3, 4}), InvalidQuery);
}

TEST(GrowthExponent, FiltersNonPositive) {
  const GrowthEstimate e = growth_exponent({1, 2, 4, 8, 16}, {0, 2, 4, 8, 16});
  EXPECT_EQ(e.filtered, 1u);
  EXPECT_NEAR(e.slope, 1.0, 1e-12);
}

TEST(DeltaRule, ParseAndEvaluate) {
  EXPECT_DOUBLE_EQ(parse_delta_rule("fixed:0.1").delta_for(100), 0.1);
  EXPECT_DOUBLE_EQ(parse_delta_rule("0.2").delta_for(7), 0.2);
  EXPECT_NEAR(parse_delta_rule("power:0.5").delta_for(400), 0.05, 1e-15);
  EXPECT_NEAR(parse_delta_rule("floor:0.5").delta_for(100), 0.1, 1e-15);
  EXPECT_THROW(parse_delta_rule("power:1.5"), InvalidQuery);
  EXPECT_THROW(parse_delta_rule("nope:1"), InvalidQuery);
}

TEST(Sweep, ZeroDeltaLeavesRatioUndefined) {
  SweepSpec s;
  s.chart = std::make_shared<MongeChart>(parabola());
  s.mode = CountMode::kUnweighted;
  s.Q_list = {10, 20, 40};
  s.delta_rule = DeltaRule::fixed(0.0);
  s.strictness = Strictness::kNonstrict;
  const SweepTable t = asymptotic_sweep(s);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& r : t.rows) EXPECT_FALSE(r.ratio.has_value());
  const std::string csv = sweep_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "Q,delta,count,main_term,ratio,residual");
}

TEST(Sweep, WeightedParaboloidRatioNearOne) {
  SweepSpec s;
  s.chart = std::make_shared<MongeChart>(paraboloid(3));
  s.weight = std::make_shared<BumpWeight>(std::vector<double>{0.5, 0.5}, 0.375);
  s.Q_list = {50, 100, 200};
  s.delta_rule = DeltaRule::power(0.5);
  s.threads = 2;
  const SweepTable t = asymptotic_sweep(s);
  ASSERT_TRUE(t.rows.back().ratio.has_value());
  EXPECT_NEAR(*t.rows.back().ratio, 1.0, 0.2);
}

TEST(Sweep, RejectsDeltaBelowFloor) {
  SweepSpec s;
  s.chart = std::make_shared<MongeChart>(parabola());
  s.mode = CountMode::kUnweighted;
  s.Q_list = {100};
  s.delta_rule = DeltaRule::fixed(0.001);
  s.require_floor = true;
  EXPECT_THROW(asymptotic_sweep(s), InvalidQuery);
}

TEST(BoundShape, EnvelopeHoldsOnParabola) {
  SweepSpec s;
  s.chart = std::make_shared<MongeChart>(parabola());
  s.weight = std::make_shared<BumpWeight>(std::vector<double>{0.5}, 0.375);
  s.Q_list = {200, 400, 800, 1600, 3200, 6400};
  s.delta_rule = DeltaRule::power(0.9);
  const SweepTable t = asymptotic_sweep(s);
  const BoundShapeReport r = bound_shape_check(2, t.rows);
  EXPECT_TRUE(r.holds) << "slack " << r.worst_slack;
  EXPECT_GT(r.C, 0.0);
}

TEST(PlateauSandwich, OrderedAtQ400) {
  const PlateauSandwich p =
      plateau_sandwich(paraboloid(3), Box({0.3, 0.3}, {0.7, 0.7}, true), 0.05, 400, 0.05, 2);
  EXPECT_TRUE(p.ordered);
  EXPECT_LE(p.lower, p.indicator);
  EXPECT_LE(p.indicator, p.upper);
  EXPECT_GT(p.lower, 0.0);
}

TEST(DimensionGrowth, TwistedCubicWitness) {
  const ProjectionWitness w = find_witness(twisted_cubic_manifold());
  ASSERT_EQ(w.s.size(), 2u);
  EXPECT_EQ(w.s[0], 1);
  EXPECT_EQ(w.s[1], 0);
  EXPECT_EQ(w.r, 1);
  EXPECT_GT(w.min_abs_det, 0.0);
}

TEST(DimensionGrowth, DominationOnEveryManifold) {
  for (const PropertyPManifold& m :
       {parabola_manifold(), circle_manifold(), twisted_cubic_manifold(), quadric_pair_manifold()}) {
    const std::vector<std::int64_t> Bs = m.dim() == 1 ? std::vector<std::int64_t>{25, 50, 100, 200}
                                                      : std::vector<std::int64_t>{8, 16, 32, 64};
    const DimensionGrowthReport r = dimension_growth_count(m, Bs, 2);
    EXPECT_TRUE(r.dominated) << m.name;
    for (const auto& row : r.rows) EXPECT_LE(row.count, row.bound_count) << m.name << " B=" << row.B;
  }
}

TEST(DimensionGrowth, ParabolaExponent) {
  const DimensionGrowthReport r = dimension_growth_count(parabola_manifold(), {125, 250, 500, 1000, 2000}, 2);
  ASSERT_TRUE(r.growth.has_value());
  EXPECT_TRUE(r.exponent_ok);
  EXPECT_EQ(r.rows.front().count, 383);
  EXPECT_EQ(r.rows.back().count, 7748);
}

TEST(DimensionGrowth, ParabolaCountsAreSquares) {
  // (a/q, a^2/q^2) with q a^2/q^2 integral: every q = m^2 contributes with any a.
  EXPECT_EQ(count_manifold_points(parabola_manifold(), 1), 2);
}

TEST(Convergence, PowerFamily) {
  const ConvergenceReport above = da_convergence_check(ApproxFunction::power(1.0), 1.2, 3, 10'000);
  EXPECT_EQ(above.verdict, "converges");
  EXPECT_TRUE(above.symbolic);
  const ConvergenceReport below = da_convergence_check(ApproxFunction::power(1.0), 0.9, 3, 10'000);
  EXPECT_EQ(below.verdict, "diverges");
  EXPECT_TRUE(below.below_threshold);
}

TEST(Convergence, LogFamily) {
  const ConvergenceReport r = da_convergence_check(ApproxFunction::log_power(2.0), 1.2, 3, 100'000);
  EXPECT_EQ(r.verdict, "converges");
  EXPECT_FALSE(r.rows.empty());
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_GE(r.rows[i].partial_sum, r.rows[i - 1].partial_sum);
}

TEST(Convergence, CustomIsInconclusive) {
  ApproxFunction f;
  f.family = ApproxFunction::Family::kCustom;
  f.custom = [](double q) { return 1.0 / (q * q); };
  EXPECT_EQ(da_convergence_check(f, 1.2, 3, 1000).verdict, "inconclusive");
}

TEST(Dyadic, ParabolaBoundedRatio) {
  const DyadicReport r = da_dyadic_count_check(parabola(), ApproxFunction::power(0.9), 0, 12, 2);
  ASSERT_EQ(r.rows.size(), 13u);
  EXPECT_TRUE(r.bounded) << "slope " << r.ratio_slope;
  EXPECT_EQ(r.rows.front().i, 0);
  EXPECT_LE(r.rows.front().count, 2);
  EXPECT_GE(r.c4, 1.0);
}

TEST(Dyadic, ConstantClamped) {
  const DyadicReport r = da_dyadic_count_check(parabola(), ApproxFunction::constant(0.49), 2, 8, 2);
  EXPECT_TRUE(r.bounded);
  for (const auto& row : r.rows) EXPECT_LE(row.threshold, 0.5);
}

TEST(GrowthExponent, FermatQuarticWithFlatMargin) {
  const MongeChart c = fermat_curve(4, 0.001);
  std::vector<double> qs, counts;
  for (std::int64_t Q : {200, 400, 800, 1600, 3200}) {
    CountQuery q;
    q.Q = Q;
    q.delta = std::pow(static_cast<double>(Q), -1.0 / 3.0);
    q.mode = CountMode::kUnweighted;
    q.keep_per_q = false;
    qs.push_back(static_cast<double>(Q));
    counts.push_back(count_near(c, q).total);
  }
  // delta^{1/4} Q^{7/4} and delta Q^2 are both Q^{5/3} here.
  const GrowthEstimate e = growth_exponent(qs, counts);
  EXPECT_GE(e.slope, 5.0 / 3.0 - 0.15);
}
