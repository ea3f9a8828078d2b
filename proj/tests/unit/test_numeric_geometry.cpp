#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "near_misses/error.hpp"
#include "near_misses/geometry.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/quadrature.hpp"
#include "near_misses/stats.hpp"

using namespace near_misses;

TEST(Numeric, CompensatedSumRecoversSmallTerms) {
  CompensatedSum<double> s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_DOUBLE_EQ(s.value(), 1000.0);
}

TEST(Numeric, DistToInt) {
  EXPECT_DOUBLE_EQ(dist_to_int(2.25), 0.25);
  EXPECT_DOUBLE_EQ(dist_to_int(-1.75), 0.25);
  EXPECT_DOUBLE_EQ(dist_to_int(3.0), 0.0);
}

TEST(Numeric, MobiusTable) {
  const auto mu = mobius_table(12);
  const std::vector<int> expected{0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};
  EXPECT_EQ(mu, expected);
}

TEST(Numeric, GcdAll) {
  const std::vector<std::int64_t> v{12, -18, 30};
  EXPECT_EQ(gcd_all(v), 6);
}

TEST(Numeric, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Geometry, RationalFromDouble) {
  const auto r = rational_from_double(0.1);
  EXPECT_EQ(r.num, 1);
  EXPECT_EQ(r.den, 10);
  EXPECT_TRUE(r.exact);
  const auto s = rational_from_double(0.95);
  EXPECT_EQ(s.num, 19);
  EXPECT_EQ(s.den, 20);
}

TEST(Geometry, LatticeRangeOpenAndClosed) {
  const Box open({0.1}, {0.9}, false);
  const Box closed({0.1}, {0.9}, true);
  EXPECT_EQ(open.lattice_range(0, 10), (std::pair<std::int64_t, std::int64_t>{2, 8}));
  EXPECT_EQ(closed.lattice_range(0, 10), (std::pair<std::int64_t, std::int64_t>{1, 9}));
  EXPECT_EQ(open.lattice_range(0, 1).first > open.lattice_range(0, 1).second, true);
}

TEST(Geometry, BoxBasics) {
  const Box b({0.0, 1.0}, {2.0, 4.0});
  EXPECT_DOUBLE_EQ(b.volume(), 6.0);
  EXPECT_DOUBLE_EQ(b.min_width(), 2.0);
  const std::vector<double> inside{1.0, 2.0};
  const std::vector<double> edge{0.0, 2.0};
  EXPECT_TRUE(b.contains(inside));
  EXPECT_FALSE(b.contains(edge));
}

TEST(Geometry, PolygonVolumeTriangle) {
  // x + y <= 1 cuts the unit square in half.
  ConvexRegion tri(Box({0.0, 0.0}, {1.0, 1.0}, true), {HalfSpace{{1.0, 1.0}, 1.0}});
  EXPECT_NEAR(tri.volume(), 0.5, 1e-14);
  const std::vector<double> in{0.2, 0.2};
  const std::vector<double> out{0.7, 0.7};
  EXPECT_TRUE(tri.contains(in));
  EXPECT_FALSE(tri.contains(out));
}

TEST(Geometry, CutVolumeInThreeDimensions) {
  // The simplex x + y + z <= 1 has volume 1/6.
  ConvexRegion simplex(Box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, true), {HalfSpace{{1.0, 1.0, 1.0}, 1.0}});
  EXPECT_NEAR(simplex.volume(), 1.0 / 6.0, 1e-9);
}

TEST(Quadrature, AdaptiveSmoothAndPeaked) {
  const auto r = integrate_adaptive<double>([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12, 1e-12, 10000);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::exp(1.0) - 1.0, 1e-13);
  const auto p = integrate_adaptive<double>([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-10, 1e-12, 10000);
  EXPECT_NEAR(p.value, 2.0 * std::atan(1.0 / 1e-2) / 1e-2, 1e-7);
}

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  const auto rule = gauss_legendre(10);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 18);
  EXPECT_NEAR(s, 2.0 / 19.0, 1e-14);
}

TEST(Stats, LinearAndLogLogFits) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  const std::vector<double> xs{10, 100, 1000, 10000};
  const std::vector<double> ys{100, 1e4, 1e6, -1};
  const auto g = loglog_fit(xs, ys);
  EXPECT_EQ(g.filtered, 1u);
  EXPECT_NEAR(g.fit.slope, 2.0, 1e-12);
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(exit_code_for(InvalidQuery("x").kind()), 1);
  EXPECT_EQ(exit_code_for(DomainError("x").kind()), 1);
  EXPECT_EQ(exit_code_for(BudgetError("x").kind()), 2);
  EXPECT_EQ(exit_code_for(ConvergenceError("x").kind()), 2);
  EXPECT_EQ(exit_code_for(ContractViolation("x").kind()), 3);
}
