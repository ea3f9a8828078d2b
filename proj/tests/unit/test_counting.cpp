#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "near_misses/counting.hpp"
#include "near_misses/error.hpp"
#include "near_misses/weights.hpp"
#include "reference.hpp"

using namespace near_misses;

namespace {

WeightPtr bump(std::vector<double> c, double r) { return std::make_shared<BumpWeight>(std::move(c), r); }

CountQuery unweighted(std::int64_t Q, double delta, Strictness s = Strictness::kStrict) {
  CountQuery q;
  q.Q = Q;
  q.delta = delta;
  q.mode = CountMode::kUnweighted;
  q.strictness = s;
  return q;
}

}  // namespace

TEST(BumpWeight, IntegralOracles) {
  EXPECT_NEAR(bump_integral(1, 1.0), 0.4439938161680794378230489, 1e-13);
  EXPECT_NEAR(bump_integral(2, 1.0), 0.4665123931783300688795562, 1e-13);
  EXPECT_NEAR(BumpWeight({0.5}, 0.3).integral(), 0.1331981448504238313469147, 1e-13);
  EXPECT_NEAR(BumpWeight({0.5, 0.5}, 0.3).integral(), 0.04198611538604970619916006, 1e-13);
}

TEST(BumpWeight, SupportAndPositivity) {
  const BumpWeight w({0.5, 0.5}, 0.3);
  const std::vector<double> c{0.5, 0.5};
  const std::vector<double> edge{0.8, 0.5};
  EXPECT_GT(w(c), 0.0);
  EXPECT_EQ(w(edge), 0.0);
  EXPECT_NEAR(w.support_box().lo()[0], 0.2, 1e-15);
}

TEST(PlateauWeight, ExactIntegral) {
  const PlateauWeight w(Box({0.3, 0.3}, {0.6, 0.7}, true), 0.05);
  EXPECT_NEAR(w.integral(), (0.3 + 0.05) * (0.4 + 0.05), 1e-15);
  const std::vector<double> inside{0.4, 0.4};
  EXPECT_EQ(w(inside), 1.0);
}

TEST(CountOn, ParabolaOracle) {
  // y = x^2 on [0, 1], Q = 10: 24 pairs with q | a^2, 5 of them primitive.
  const CountResult r = count_on(parabola(), 10);
  EXPECT_EQ(r.count, 24);
  CountQuery q = unweighted(10, 0.0, Strictness::kNonstrict);
  EXPECT_EQ(count_near(parabola(), q).count, 24);
  q.coprime = true;
  EXPECT_EQ(count_coprime(parabola(), q).direct.count, 5);
}

TEST(CountOn, UnsupportedWithoutExactForm) {
  EXPECT_THROW(count_on(robert_sargos_surface(1.5), 10), UnsupportedError);
}

TEST(CountOn, ParabolaExampleLowerBound) {
  const CountResult r = count_on(parabola(), 2000);
  std::int64_t prefix = 0;
  std::size_t i = 0;
  for (std::int64_t Q = 1; Q <= 2000; ++Q) {
    prefix += r.per_q[i++].count;
    std::int64_t bound = 0;
    for (std::int64_t m = 1; m * m <= Q; ++m) bound += m;
    ASSERT_GE(prefix, bound) << "Q = " << Q;
  }
}

TEST(CountNear, EmptyLatticeSlice) {
  CountQuery q;
  q.Q = 1;
  q.delta = 0.1;
  q.mode = CountMode::kWeighted;
  q.weight = bump({0.5}, 0.3);
  EXPECT_EQ(count_near(paraboloid(2), q).total, 0.0);
}

TEST(CountNear, MatchesNaiveReferenceOnCatalog) {
  for (const auto& entry : surface_catalog()) {
    for (Strictness s : {Strictness::kStrict, Strictness::kNonstrict}) {
      const CountQuery q = unweighted(entry.chart.dim() == 1 ? 50 : 30, 0.05, s);
      std::int64_t npts = 0;
      const double ref = reference::naive_count(entry.chart, q, &npts);
      const CountResult r = count_near(entry.chart, q);
      EXPECT_EQ(r.count, npts) << entry.name;
      EXPECT_EQ(r.total, ref) << entry.name;
    }
  }
}

TEST(CountNear, WeightedMatchesReference) {
  CountQuery q;
  q.Q = 40;
  q.delta = 0.1;
  q.mode = CountMode::kWeighted;
  q.weight = bump({0.5, 0.5}, 0.3);
  const double ref = reference::naive_count(paraboloid(3), q);
  EXPECT_NEAR(count_near(paraboloid(3), q).total, ref, 1e-10 * ref);
}

TEST(CountNear, IndicatorWithCutMatchesReference) {
  CountQuery q;
  q.Q = 40;
  q.delta = 0.1;
  q.mode = CountMode::kIndicator;
  q.region = ConvexRegion(Box({0.2, 0.2}, {0.8, 0.8}, true), {HalfSpace{{1.0, 1.0}, 1.2}});
  std::int64_t npts = 0;
  reference::naive_count(paraboloid(3), q, &npts);
  EXPECT_EQ(count_near(paraboloid(3), q).count, npts);
}

TEST(CountNear, ThreadCountIndependent) {
  CountQuery q;
  q.Q = 120;
  q.delta = 0.07;
  q.mode = CountMode::kWeighted;
  q.weight = bump({0.5, 0.5}, 0.3);
  q.threads = 1;
  const CountResult a = count_near(paraboloid(3), q);
  for (int t : {2, 4, 8}) {
    q.threads = t;
    const CountResult b = count_near(paraboloid(3), q);
    EXPECT_EQ(a.total, b.total);
    EXPECT_EQ(a.count, b.count);
    ASSERT_EQ(a.per_q.size(), b.per_q.size());
    for (std::size_t i = 0; i < a.per_q.size(); ++i) EXPECT_EQ(a.per_q[i].subtotal, b.per_q[i].subtotal);
  }
}

TEST(CountNear, ZeroDeltaAgreesWithExactCount) {
  for (const char* name : {"parabola", "circle", "paraboloid3", "sphere3"}) {
    const MongeChart c = builtin_surface(name);
    const std::int64_t Q = c.dim() == 1 ? 200 : 40;
    const std::int64_t exact = count_on(c, Q).count;
    EXPECT_EQ(count_near(c, unweighted(Q, 0.0, Strictness::kNonstrict)).count, exact) << name;
    // Tiny positive delta can only see more points.
    EXPECT_GE(count_near(c, unweighted(Q, 1e-9)).count, exact) << name;
  }
}

TEST(CountNear, CircleOracle) {
  // x in [0, 1], Q = 25: pairs a^2 + b^2 = q^2 with 0 <= a <= q.
  const MongeChart c = sphere_patch(2, 0.05, Box({0.0}, {1.0}, true));
  EXPECT_EQ(count_on(c, 25).count, 66);
}

TEST(CountNear, MonotoneInDelta) {
  double prev = -1.0;
  for (double d : {0.0, 0.01, 0.05, 0.1, 0.2, 0.3, 0.45}) {
    const double t = count_near(sphere_patch(3), unweighted(25, d)).total;
    EXPECT_GE(t, prev);
    prev = t;
  }
}

TEST(CountNear, NonstrictDominatesStrict) {
  const MongeChart c = paraboloid(3);
  for (double d : {0.05, 0.125, 0.25}) {
    EXPECT_LE(count_near(c, unweighted(40, d)).count,
              count_near(c, unweighted(40, d, Strictness::kNonstrict)).count);
  }
}

TEST(CountNear, InvalidQueries) {
  EXPECT_THROW(count_near(parabola(), unweighted(0, 0.1)), InvalidQuery);
  EXPECT_THROW(count_near(parabola(), unweighted(10, 0.5)), InvalidQuery);
  CountQuery q = unweighted(10, 0.1);
  q.mode = CountMode::kWeighted;
  q.weight = bump({0.2}, 0.3);
  EXPECT_THROW(count_near(paraboloid(2), q), InvalidQuery);
  q.mode = CountMode::kUnweighted;
  EXPECT_THROW(main_term(q, paraboloid(2)), InvalidQuery);
}

TEST(Coprime, DirectMatchesMobius) {
  for (const char* name : {"parabola", "paraboloid3", "circle"}) {
    const MongeChart c = builtin_surface(name);
    CountQuery q = unweighted(c.dim() == 1 ? 100 : 40, 0.1);
    q.coprime = true;
    const CoprimeResult r = count_coprime(c, q);
    EXPECT_TRUE(r.cross_checked) << name;
    EXPECT_EQ(r.discrepancy, 0.0) << name;
    q.coprime = false;
    std::int64_t npts = 0;
    q.coprime = true;
    reference::naive_count(c, q, &npts);
    EXPECT_EQ(r.direct.count, npts) << name;
  }
}

TEST(MainTerm, WeightedOracleAndIndicator) {
  CountQuery q;
  q.Q = 100;
  q.delta = 0.05;
  q.mode = CountMode::kWeighted;
  q.weight = bump({0.5, 0.5}, 0.3);
  EXPECT_NEAR(main_term(q, paraboloid(3)), 1399.5371795349902066, 1e-9);
  q.mode = CountMode::kIndicator;
  q.region = ConvexRegion(Box({0.2, 0.2}, {0.8, 0.8}, true));
  EXPECT_NEAR(main_term(q, paraboloid(3)), 2.0 * 0.36 / 3.0 * 0.05 * 1e6, 1e-6);
}

TEST(WeightedPointTotal, ApproximatesIntegralTimesLattice) {
  const BumpWeight w({0.5, 0.5}, 0.3);
  const double n0 = weighted_point_total(paraboloid(3), w, 200);
  // sum_q q^2 w^(0) approximately
  double s = 0.0;
  for (int q = 1; q <= 200; ++q) s += static_cast<double>(q) * q;
  EXPECT_NEAR(n0 / (s * w.integral()), 1.0, 1e-3);
}
