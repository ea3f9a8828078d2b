#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "near_misses/surfaces.hpp"
#include "near_misses/weights.hpp"

namespace near_misses {

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 100;
  int max_halvings = 30;
  /// Extra multistart seeds per axis when the warm start and the domain
  /// centre both fail.
  int multistart_per_axis = 5;
};

/// x in D with grad f(x) = y, by damped Newton. Throws ConvergenceError when
/// y is not in grad f(D); a second distinct root raises CurvatureError.
Eigen::VectorXd grad_inverse(const MongeChart& chart, std::span<const double> y, const NewtonOptions& opts = {},
                             std::optional<Eigen::VectorXd> hint = std::nullopt);

/// Same, returning nullopt instead of throwing for y outside the dual domain.
std::optional<Eigen::VectorXd> try_grad_inverse(const MongeChart& chart, std::span<const double> y,
                                                const NewtonOptions& opts = {},
                                                std::optional<Eigen::VectorXd> hint = std::nullopt);

/// Legendre conjugate f*(y) = y.x - f(x), x = (grad f)^{-1}(y), on R = grad f(D).
class DualChart {
 public:
  explicit DualChart(MongeChart base, NewtonOptions opts = {});

  const MongeChart& base() const { return base_; }
  /// Enclosing box of R, from the image of a grid over D.
  const Box& dual_box() const { return dual_box_; }
  bool contains(std::span<const double> y) const;

  double value(std::span<const double> y) const;
  /// grad f* = (grad f)^{-1}
  Eigen::VectorXd gradient(std::span<const double> y) const;
  /// hess f* = (hess f)^{-1} at x = (grad f)^{-1}(y)
  Eigen::MatrixXd hessian(std::span<const double> y) const;

  /// The dual as a chart in its own right (domain: dual box, membership by
  /// Newton convergence; derivatives closed-form through the inverse map).
  MongeChart as_chart() const;

 private:
  MongeChart base_;
  NewtonOptions opts_;
  Box dual_box_;
};

/// Checks curvature and injectivity, then builds the dual. Throws
/// CurvatureError when the curvature window is not strictly positive.
DualChart legendre_dual(const MongeChart& chart, const NewtonOptions& opts = {});

struct DualityResiduals {
  std::size_t points = 0;
  double legendre = 0.0;        // |f*(grad f(x)) - (x.grad f(x) - f(x))|
  double involution = 0.0;      // |f**(x) - f(x)|
  double gradient_inverse = 0.0;  // |grad f*(grad f(x)) - x|
  double reciprocity = 0.0;     // |det hess f*(y) det hess f(x) - 1|, hess f* by finite differences
  bool signature_constant = true;
  int signature = 0;
};

/// All duality invariants evaluated on a grid over the chart domain.
DualityResiduals verify_duality(const MongeChart& chart, std::size_t grid_per_axis);

struct DualGeometry {
  /// Closed box enclosing U = {w != 0}.
  Box support;
  /// Boundary samples of V = grad f(U) and of R = grad f(D).
  std::vector<Eigen::VectorXd> v_boundary;
  std::vector<Eigen::VectorXd> r_boundary;
  /// Half the sampled distance between the two boundaries.
  double rho = 0.0;
  /// Largest nearest-neighbour gap within either boundary sample.
  double resolution = 0.0;
  std::shared_ptr<const MongeChart> chart;
  WeightPtr weight;

  /// y in V: (grad f)^{-1}(y) exists and w is nonzero there.
  bool in_v(std::span<const double> y) const;
  /// 0 inside V, else distance to the sampled boundary of V.
  double distance_to_v(std::span<const double> y) const;
};

DualGeometry dual_geometry(const MongeChart& chart, WeightPtr w, std::size_t samples = 10'000);

/// Number of positive eigenvalues minus negative ones.
int signature(const Eigen::MatrixXd& symmetric);

}  // namespace near_misses
