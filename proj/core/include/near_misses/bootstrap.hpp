#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace near_misses {

using Rational = mpq_class;

/// n - (n-1)/(2 beta_prev - n + 1), exact. Throws DomainError if beta_prev <= n-1.
Rational beta_step(int n, const Rational& beta_prev);

struct ExponentSequence {
  int n = 0;
  std::vector<Rational> betas;  // betas[0] = beta_1 = n
  const Rational& beta(std::size_t i) const { return betas.at(i - 1); }
};

/// beta_1 .. beta_{i_max}. Checks the n = 3 closed form, the transformed
/// recursion and the contraction factor; a failure is a ContractViolation.
ExponentSequence exponent_sequence(int n, std::int64_t i_max);

/// n >= 4 (and n = 2): floor(log log Q / log 1.5); n = 3: floor(sqrt(log Q)).
/// Q < 3 throws InvalidQuery.
std::int64_t iteration_schedule(int n, double Q);
std::int64_t iteration_schedule_log(int n, double log_q);

struct ErrorTermModel {
  int n = 3;
  double C = 2.0;
  double c = 1.0;
  double kappa = 1.0;
  /// Q^2 exp(c sqrt(log Q)) for n = 3, Q^{3/2} (log Q)^kappa for n = 2,
  /// Q^{n-1} (log Q)^kappa otherwise.
  double evaluate(double Q) const;
  std::string describe() const;
};

/// True if E/Q^{n-1} increases and E/Q^n decreases along the (sorted) grid.
bool error_term_shape_holds(const ErrorTermModel& model, std::span<const double> q_grid);

/// Least-squares fit of c (n = 3) or kappa (otherwise) to measured excesses
/// |N - main term|; points with non-positive excess are ignored.
ErrorTermModel fit_error_term(int n, std::span<const double> qs, std::span<const double> excess);

struct PredictedBound {
  double envelope = 0.0;       // min over i <= schedule of delta Q^n + C^i Q^{beta_i} log Q
  std::int64_t best_i = 0;
  std::int64_t schedule = 0;
  double terminal = 0.0;       // delta Q^n + E_n(Q)
  std::vector<double> per_i;   // index i - 1
};

PredictedBound predicted_bound(int n, double Q, double delta, const ErrorTermModel& model,
                               const ExponentSequence& seq);

}  // namespace near_misses
