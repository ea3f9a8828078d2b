#pragma once

#include <cstdint>
#include <vector>

#include "near_misses/numeric.hpp"
#include "near_misses/surfaces.hpp"
#include "near_misses/weights.hpp"

namespace near_misses {

/// F_J(theta) = (sin(pi J theta) / (J sin(pi theta)))^2, equal to 1 at integers.
double fejer_eval(std::int64_t J, double theta);
/// The same kernel as sum_{|j| < J} (J - |j|)/J^2 e(j theta).
double fejer_series(std::int64_t J, double theta);
double fejer_coefficient(std::int64_t J, std::int64_t j);

/// (pi^2/4) F_J(theta) >= 1 whenever ||theta|| <= delta; vacuously true
/// otherwise. Requires J = floor(1/(2 delta)).
bool fejer_majorization(std::int64_t J, double delta, double theta);

/// Degree-J trigonometric polynomials with S-(x) <= indicator of [alpha, beta] mod 1 <= S+(x).
class SelbergPair {
 public:
  SelbergPair(std::int64_t J, double alpha, double beta);

  std::int64_t J() const { return J_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// Fourier coefficients for |h| <= J.
  Complex coeff_plus(std::int64_t h) const;
  Complex coeff_minus(std::int64_t h) const;

  double plus(double x) const;
  double minus(double x) const;

  /// 1/(J+1) + min(beta - alpha, 1/(pi |h|))
  double coefficient_bound(std::int64_t h) const;

 private:
  std::int64_t J_;
  double alpha_;
  double beta_;
  std::vector<Complex> plus_;   // index h + J
  std::vector<Complex> minus_;
};

struct SandwichReport {
  std::size_t grid_points = 0;
  std::size_t violations = 0;
  /// max over the grid of (indicator - S+) and (S- - indicator), endpoints excluded
  double worst_excess = 0.0;
  double worst_x = 0.0;
  double zero_coeff_error = 0.0;   // |S+^(0) - (b - a + 1/(J+1))| max |S-^(0) - (b - a - 1/(J+1))|
  double worst_coeff_slack = 0.0;  // max over 0 < |h| <= J of |S^(h)| - bound (<= 0 when it holds)
  bool ok = false;
};

/// Validates all three contracts on a uniform grid of R/Z.
SandwichReport validate_selberg(const SelbergPair& pair, std::size_t grid = 10'000, double tol = 1e-12);

/// Builds the pair and validates it; throws ContractViolation with a witness
/// if any contract fails.
SelbergPair selberg_pair(std::int64_t J, double alpha, double beta);

struct DecompositionCheck {
  double weighted_count = 0.0;  // N^w(Q, delta)
  double n0 = 0.0;              // sum of w(a/q)
  double lhs = 0.0;             // |N^w - 2 delta N0|
  double rhs = 0.0;             // N0/(J+1) + 2 sum_j b_j |E_j|
  std::vector<double> exp_sums; // |E_j| = |sum_{a,q} w(a/q) e(j q f(a/q))|, j = 1..J
  bool holds = false;
};

/// Majorant/minorant bound on the weighted count through its exponential sums.
DecompositionCheck selberg_decomposition_check(const MongeChart& chart, WeightPtr w, std::int64_t Q, double delta,
                                               std::int64_t J);

}  // namespace near_misses
