#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "near_misses/exact.hpp"
#include "near_misses/geometry.hpp"

namespace near_misses {

using ScalarField = std::function<double(std::span<const double>)>;
using VectorField = std::function<Eigen::VectorXd(std::span<const double>)>;
using MatrixField = std::function<Eigen::MatrixXd(std::span<const double>)>;
using Membership = std::function<bool(std::span<const double>)>;

/// Everything needed to build a chart. Missing derivative fields fall back
/// to central finite differences.
struct ChartSpec {
  std::string name;
  std::size_t ambient_dim = 0;
  Box domain;
  std::vector<HalfSpace> cuts;
  Membership membership;
  ScalarField value;
  VectorField gradient;
  MatrixField hessian;
  std::optional<ExactForm> exact;
  std::optional<int> smoothness_order;
  std::optional<std::pair<double, double>> curvature_window;
};

/// Hypersurface patch x -> (x, f(x)) over an open domain in R^{n-1}.
/// Immutable once built; copies share nothing mutable.
class MongeChart {
 public:
  explicit MongeChart(ChartSpec spec);

  const std::string& name() const { return name_; }
  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dim() const { return ambient_dim_ - 1; }
  const ConvexRegion& domain() const { return domain_; }
  const Box& domain_box() const { return domain_.bounding_box(); }
  bool contains(std::span<const double> x) const;
  /// Domain test minus the box: polytope cuts and any membership predicate.
  bool passes_refinement(std::span<const double> x) const;

  double fd_step() const { return fd_step_; }
  int smoothness_order() const { return smoothness_order_; }
  bool has_closed_gradient() const { return static_cast<bool>(gradient_); }
  bool has_closed_hessian() const { return static_cast<bool>(hessian_); }
  const std::optional<ExactForm>& exact() const { return exact_; }
  const std::optional<std::pair<double, double>>& declared_curvature_window() const { return window_; }

  // Unchecked evaluation; callers guarantee x is in the domain.
  double value(std::span<const double> x) const { return value_(x); }
  Eigen::VectorXd gradient(std::span<const double> x) const;
  Eigen::MatrixXd hessian(std::span<const double> x) const;

  /// Five-point central differences with step fd_step().
  Eigen::VectorXd fd_gradient(std::span<const double> x) const;
  Eigen::MatrixXd fd_hessian(std::span<const double> x) const;

  /// Same surface on a smaller box (the locality shrink).
  MongeChart restricted(Box box) const;

  const ChartSpec& spec() const { return spec_; }

 private:
  ChartSpec spec_;
  std::string name_;
  std::size_t ambient_dim_;
  ConvexRegion domain_;
  Membership membership_;
  ScalarField value_;
  VectorField gradient_;
  MatrixField hessian_;
  std::optional<ExactForm> exact_;
  std::optional<std::pair<double, double>> window_;
  double fd_step_;
  int smoothness_order_;
};

int default_smoothness_order(std::size_t ambient_dim);

struct ChartEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Checked evaluation; throws DomainError outside the domain.
ChartEvaluation eval(const MongeChart& chart, std::span<const double> x);

/// Cell-centred tensor grid over `region` (default: the chart's box),
/// keeping only points inside the chart domain.
struct GridSpec {
  std::size_t per_axis = 10;
  std::optional<Box> region;
};

std::vector<std::vector<double>> grid_points(const MongeChart& chart, const GridSpec& grid);

struct CurvatureReport {
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<double> argmin;
  std::vector<double> argmax;
  std::size_t points = 0;
  bool violation = false;
};

CurvatureReport curvature_window(const MongeChart& chart, const GridSpec& grid);

struct DiffeoReport {
  std::size_t points = 0;
  std::size_t pairs = 0;
  std::size_t collisions = 0;
  /// min over pairs of |grad f(x) - grad f(x')| / |x - x'|
  double min_ratio = 0.0;
  bool injective = false;
};

DiffeoReport check_gradient_diffeo(const MongeChart& chart, const GridSpec& grid);

struct DerivativeCheck {
  double h = 0.0;
  std::size_t points = 0;
  double max_gradient_error = 0.0;
  double max_hessian_error = 0.0;
  double max_asymmetry = 0.0;
};

/// Closed-form derivatives against central differences on ~`count` grid points.
DerivativeCheck verify_derivatives(const MongeChart& chart, std::size_t count);

// Catalog.
MongeChart paraboloid(std::size_t n, std::optional<Box> domain = std::nullopt);
MongeChart parabola(std::optional<Box> domain = std::nullopt);
MongeChart sphere_patch(std::size_t n, double margin = 0.05, std::optional<Box> domain = std::nullopt);
MongeChart fermat_curve(int m, double margin = 0.05);
MongeChart robert_sargos_surface(double alpha = 1.5, std::optional<Box> domain = std::nullopt);
MongeChart polynomial_chart(std::string name, std::size_t ambient_dim, RationalPolynomial radicand, int root,
                            Box domain);

struct SurfaceCatalogEntry {
  std::string name;
  MongeChart chart;
  std::string provenance;
};

std::vector<SurfaceCatalogEntry> surface_catalog();

/// Resolves catalog names: paraboloid<n>, parabola, circle, sphere<n>,
/// fermat<m>, rs. `margin` applies to sphere and Fermat patches.
MongeChart builtin_surface(std::string_view name, std::optional<double> margin = std::nullopt);

}  // namespace near_misses
