#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "near_misses/duality.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/surfaces.hpp"
#include "near_misses/weights.hpp"

namespace near_misses {

/// I(j, k; q) = int w(x) e(q (j f(x) - k.x)) dx
struct OscillatoryQuery {
  std::int64_t j = 1;
  std::vector<std::int64_t> k;
  std::int64_t q = 1;
  double quad_tol = 1e-10;
  /// Upper bound on integrand evaluations across all refinement levels.
  std::size_t max_evaluations = 400'000'000;
};

struct QuadratureValue {
  Complex value;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::vector<std::size_t> panels_per_axis;
};

/// Composite tensor Gauss-Legendre over the weight's support box. Panels
/// are placed so that each holds a bounded number of phase cycles, then all
/// panels are bisected until two successive levels agree to quad_tol.
/// Throws BudgetError (carrying the best estimate in its message) when the
/// evaluation budget runs out.
QuadratureValue integral_quadrature(const MongeChart& chart, const Weight& w, const OscillatoryQuery& query);

enum class KClass { kK1, kK2, kK3 };
std::string to_string(KClass c);

/// K1: k/j in V; K2: dist(k/j, V) >= rho; K3: the rest.
KClass classify_k(std::int64_t j, const std::vector<std::int64_t>& k, const DualGeometry& geometry);

struct KClassCensus {
  std::int64_t j = 0;
  std::int64_t k1 = 0;
  std::int64_t k3 = 0;
  /// (|K1| + |K3|) / j^{n-1}
  double constant = 0.0;
};

/// Counts K1 and K3 frequencies for one j (K2 is the infinite remainder).
KClassCensus classify_census(std::int64_t j, const DualGeometry& geometry);

struct CriticalPoint {
  Eigen::VectorXd x;
  /// f(x) - (k/j).x, which equals -f*(k/j)
  double phase = 0.0;
  double f_star = 0.0;
  /// |j grad f(x) - k|
  double residual = 0.0;
};

/// (grad f)^{-1}(k/j). Throws ConvergenceError when k/j is outside grad f(D).
CriticalPoint critical_point(const MongeChart& chart, std::int64_t j, const std::vector<std::int64_t>& k);

struct StationaryPhaseResult {
  Complex value;          // quadrature
  double quad_error = 0.0;
  Eigen::VectorXd critical_point;
  int sigma = 0;
  double Delta = 0.0;     // |det hess f(x_{j,k})|
  Complex leading;
  double lambda = 0.0;    // q j
  /// lambda^{-(n+1)/2}, the scale of the first correction
  double error_scale = 0.0;
  double err_bound_exponent = 0.0;
};

/// Leading term w(x0) Delta^{-1/2} (qj)^{-(n-1)/2} e(-qj f*(k/j) + sigma/8)
/// together with the quadrature value it approximates.
StationaryPhaseResult stationary_phase_approx(const MongeChart& chart, const Weight& w,
                                              const OscillatoryQuery& query, bool with_quadrature = true);

struct DecayPoint {
  std::int64_t q = 0;
  double lambda1 = 0.0;
  double magnitude = 0.0;
  double quad_error = 0.0;
  bool resolved = false;
};

struct DecayReport {
  std::vector<DecayPoint> points;
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::size_t resolved = 0;
  bool passes = false;  // slope <= -4 over at least three resolved points
};

/// |I(j,k;q)| against lambda1 = q dist(k, jV) for a K2 frequency. Points whose
/// magnitude is below 100 times their quadrature error (or 1e-14) are
/// reported but excluded from the fit.
DecayReport nonstationary_decay(const MongeChart& chart, const Weight& w, const DualGeometry& geometry,
                                std::int64_t j, const std::vector<std::int64_t>& k,
                                const std::vector<std::int64_t>& qs, double quad_tol = 1e-13);

struct PoissonCheck {
  Complex lattice_sum;
  /// q^{n-1} sum_k I(j,k;q) over the truncated box
  Complex dual_sum;
  double residual = 0.0;
  double quad_error = 0.0;
  double tail_estimate = 0.0;
  std::int64_t truncation = 0;
  std::size_t terms = 0;
  std::vector<std::int64_t> k_lo;
  std::vector<std::int64_t> k_hi;
};

/// Both sides of the Poisson summation identity for the exponential sum
/// sum_a w(a/q) e(jq f(a/q)). Without an explicit truncation, the k box
/// grows until the scaled decay tail estimate drops below `tail_target`.
/// Supports n = 2 and 3.
PoissonCheck poisson_check(const MongeChart& chart, const Weight& w, std::int64_t j, std::int64_t q,
                           std::optional<std::int64_t> truncation = std::nullopt, double tail_target = 1e-8,
                           double quad_tol = 1e-13);

/// sum_a w(a/q) e(jq f(a/q)) over lattice points of the support.
Complex weighted_exponential_sum(const MongeChart& chart, const Weight& w, std::int64_t j, std::int64_t q);

}  // namespace near_misses
