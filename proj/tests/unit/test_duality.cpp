#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "near_misses/duality.hpp"
#include "near_misses/error.hpp"

using namespace near_misses;

namespace {
std::vector<double> pt(std::initializer_list<double> v) { return v; }
}  // namespace

TEST(GradInverse, Paraboloid) {
  const MongeChart c = paraboloid(3);
  const auto x = grad_inverse(c, pt({0.3, 0.7}));
  EXPECT_NEAR(x(0), 0.3, 1e-14);
  EXPECT_NEAR(x(1), 0.7, 1e-14);
}

TEST(GradInverse, ParabolaHalves) {
  const auto x = grad_inverse(parabola(Box({0.0}, {1.0})), pt({1.2}));
  EXPECT_NEAR(x(0), 0.6, 1e-14);
}

TEST(GradInverse, SphereRoundTrip) {
  const MongeChart c = sphere_patch(3);
  const Eigen::VectorXd y = c.gradient(pt({0.3, 0.4}));
  const auto x = grad_inverse(c, std::span<const double>(y.data(), 2));
  EXPECT_NEAR(x(0), 0.3, 1e-10);
  EXPECT_NEAR(x(1), 0.4, 1e-10);
}

TEST(GradInverse, OutsideRangeFails) {
  EXPECT_THROW(grad_inverse(paraboloid(3), pt({2.0, 0.5})), ConvergenceError);
  EXPECT_FALSE(try_grad_inverse(parabola(Box({0.0}, {1.0})), pt({2.5})).has_value());
}

TEST(LegendreDual, ClosedForms) {
  const DualChart self = legendre_dual(paraboloid(3));
  EXPECT_NEAR(self.value(pt({0.3, 0.6})), 0.5 * (0.09 + 0.36), 1e-14);
  const DualChart par = legendre_dual(parabola(Box({0.0}, {1.0})));
  for (double y : {0.2, 0.9, 1.7}) EXPECT_NEAR(par.value(pt({y})), y * y / 4.0, 1e-14);
  EXPECT_NEAR(par.hessian(pt({1.0}))(0, 0), 0.5, 1e-12);
}

TEST(LegendreDual, DegenerateCurvatureRejected) {
  ChartSpec s;
  s.name = "line";
  s.ambient_dim = 2;
  s.domain = Box({0.0}, {1.0});
  s.value = [](std::span<const double> x) { return 2.0 * x[0]; };
  s.gradient = [](std::span<const double>) { return Eigen::VectorXd::Constant(1, 2.0); };
  s.hessian = [](std::span<const double>) { return Eigen::MatrixXd::Zero(1, 1); };
  EXPECT_THROW(legendre_dual(MongeChart(std::move(s))), CurvatureError);
}

TEST(VerifyDuality, CatalogResiduals) {
  for (const char* name : {"paraboloid3", "parabola", "circle", "sphere3", "rs"}) {
    const MongeChart c = builtin_surface(name);
    const DualityResiduals r = verify_duality(c, c.dim() == 1 ? 100 : 10);
    EXPECT_GE(r.points, 100u) << name;
    EXPECT_LE(r.legendre, 1e-10) << name;
    EXPECT_LE(r.involution, 1e-9) << name;
    EXPECT_LE(r.gradient_inverse, 1e-9) << name;
    EXPECT_LE(r.reciprocity, 1e-6) << name;
    EXPECT_TRUE(r.signature_constant) << name;
  }
}

TEST(DualGeometry, ParaboloidBall) {
  const MongeChart c = paraboloid(3, Box({-0.8, -0.8}, {0.8, 0.8}));
  const DualGeometry g = dual_geometry(c, std::make_shared<BumpWeight>(std::vector<double>{0.0, 0.0}, 0.3));
  EXPECT_NEAR(g.rho, 0.25, 5e-3);
  EXPECT_TRUE(g.in_v(pt({0.1, 0.1})));
  EXPECT_FALSE(g.in_v(pt({0.5, 0.0})));
  EXPECT_NEAR(g.distance_to_v(pt({1.0, 0.0})), 0.7, 5e-3);
}

TEST(DualGeometry, ParabolaInterval) {
  const DualGeometry g =
      dual_geometry(parabola(Box({0.0}, {1.0})), std::make_shared<BumpWeight>(std::vector<double>{0.5}, 0.3));
  EXPECT_NEAR(g.rho, 0.2, 1e-9);
  EXPECT_TRUE(g.in_v(pt({1.0})));
  EXPECT_NEAR(g.distance_to_v(pt({2.0})), 0.4, 1e-9);
}

TEST(Signature, Counts) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, -3;
  EXPECT_EQ(signature(m), 0);
  EXPECT_EQ(signature(Eigen::MatrixXd::Identity(2, 2)), 2);
  EXPECT_EQ(signature(-Eigen::MatrixXd::Identity(3, 3)), -3);
}
