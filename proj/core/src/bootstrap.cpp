#include "near_misses/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "near_misses/error.hpp"

namespace near_misses {

namespace {

// mpq_class(p, q) does not reduce; GMP arithmetic expects reduced operands.
Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

}  // namespace

Rational beta_step(int n, const Rational& beta_prev) {
  if (n < 2) throw InvalidQuery("beta_step: n must be at least 2");
  const Rational floor_value(n - 1);
  if (beta_prev <= floor_value) {
    throw DomainError("beta_step: beta_prev = " + beta_prev.get_str() + " must exceed n-1 = " + std::to_string(n - 1));
  }
  Rational out = Rational(n) - floor_value / (2 * beta_prev - n + 1);
  out.canonicalize();
  return out;
}

ExponentSequence exponent_sequence(int n, std::int64_t i_max) {
  if (i_max < 1) throw InvalidQuery("exponent_sequence: i_max must be at least 1");
  if (n < 2) throw InvalidQuery("exponent_sequence: n must be at least 2");
  ExponentSequence seq;
  seq.n = n;
  seq.betas.reserve(static_cast<std::size_t>(i_max));
  seq.betas.emplace_back(n);
  const Rational nm1(n - 1);
  const Rational factor_cap(2, n - 1);
  for (std::int64_t i = 2; i <= i_max; ++i) {
    const Rational& prev = seq.betas.back();
    Rational next = beta_step(n, prev);
    const Rational gap_prev = prev - nm1;
    const Rational gap = next - nm1;
    if (gap <= 0 || gap >= gap_prev) {
      throw ContractViolation("exponent_sequence: contraction failed at i = " + std::to_string(i));
    }
    // beta_i - (n-1) = (beta_{i-1} - (n-1)) / (beta_{i-1} - (n-1)/2)
    Rational transformed = gap_prev / (prev - frac(n - 1, 2));
    transformed.canonicalize();
    if (transformed != gap) {
      throw ContractViolation("exponent_sequence: transformed recursion mismatch at i = " + std::to_string(i));
    }
    if (n >= 4 && gap / gap_prev > factor_cap) {
      throw ContractViolation("exponent_sequence: contraction factor above 2/(n-1) at i = " + std::to_string(i));
    }
    if (n == 3 && next != Rational(2) + frac(1, static_cast<long>(i))) {
      throw ContractViolation("exponent_sequence: beta_" + std::to_string(i) + " = " + next.get_str() +
                              " differs from 2 + 1/i");
    }
    seq.betas.push_back(std::move(next));
  }
  return seq;
}

std::int64_t iteration_schedule_log(int n, double log_q) {
  if (!(log_q >= std::log(3.0) - 1e-15)) throw InvalidQuery("iteration_schedule: requires Q >= 3");
  // The slack keeps exact inputs such as log Q = 16 from rounding down.
  constexpr double kSlack = 1e-9;
  if (n == 3) return static_cast<std::int64_t>(std::floor(std::sqrt(log_q) + kSlack));
  if (n < 2) throw InvalidQuery("iteration_schedule: n must be at least 2");
  return static_cast<std::int64_t>(std::floor(std::log(log_q) / std::log(1.5) + kSlack));
}

std::int64_t iteration_schedule(int n, double Q) {
  if (!(Q >= 3.0)) throw InvalidQuery("iteration_schedule: requires Q >= 3");
  return iteration_schedule_log(n, std::log(Q));
}

double ErrorTermModel::evaluate(double Q) const {
  const double lq = std::log(Q);
  if (n == 3) return Q * Q * std::exp(c * std::sqrt(lq));
  if (n == 2) return std::pow(Q, 1.5) * std::pow(lq, kappa);
  return std::pow(Q, n - 1) * std::pow(lq, kappa);
}

std::string ErrorTermModel::describe() const {
  if (n == 3) return "Q^2 exp(" + std::to_string(c) + " sqrt(log Q))";
  if (n == 2) return "Q^1.5 (log Q)^" + std::to_string(kappa);
  return "Q^" + std::to_string(n - 1) + " (log Q)^" + std::to_string(kappa);
}

bool error_term_shape_holds(const ErrorTermModel& model, std::span<const double> q_grid) {
  double prev_low = -std::numeric_limits<double>::infinity();
  double prev_high = std::numeric_limits<double>::infinity();
  const double lower_power = model.n - 1;
  for (double Q : q_grid) {
    const double e = model.evaluate(Q);
    const double low = e / std::pow(Q, lower_power);
    const double high = e / std::pow(Q, model.n);
    if (!(low > prev_low) || !(high < prev_high)) return false;
    prev_low = low;
    prev_high = high;
  }
  return true;
}

ErrorTermModel fit_error_term(int n, std::span<const double> qs, std::span<const double> excess) {
  if (qs.size() != excess.size()) throw InvalidQuery("fit_error_term: size mismatch");
  ErrorTermModel m;
  m.n = n;
  // Through-origin least squares: y = p * x.
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (!(excess[i] > 0.0) || !(qs[i] > std::exp(1.0))) continue;
    const double lq = std::log(qs[i]);
    double x = 0.0;
    double y = 0.0;
    if (n == 3) {
      x = std::sqrt(lq);
      y = std::log(excess[i]) - 2.0 * lq;
    } else {
      x = std::log(lq);
      y = std::log(excess[i]) - (n == 2 ? 1.5 : n - 1.0) * lq;
    }
    sxy += x * y;
    sxx += x * x;
  }
  const double p = sxx > 0.0 ? std::max(sxy / sxx, 1e-6) : 1.0;
  if (n == 3) {
    m.c = p;
  } else {
    m.kappa = p;
  }
  return m;
}

PredictedBound predicted_bound(int n, double Q, double delta, const ErrorTermModel& model,
                               const ExponentSequence& seq) {
  if (seq.n != n) throw InvalidQuery("predicted_bound: sequence dimension mismatch");
  PredictedBound b;
  b.schedule = std::max<std::int64_t>(1, iteration_schedule(n, Q));
  const double main = delta * std::pow(Q, n);
  const double lq = std::log(Q);
  b.envelope = std::numeric_limits<double>::infinity();
  const auto top = std::min<std::int64_t>(b.schedule, static_cast<std::int64_t>(seq.betas.size()));
  for (std::int64_t i = 1; i <= top; ++i) {
    const double beta = seq.beta(static_cast<std::size_t>(i)).get_d();
    const double v = main + std::pow(model.C, static_cast<double>(i)) * std::pow(Q, beta) * lq;
    b.per_i.push_back(v);
    if (v < b.envelope) {
      b.envelope = v;
      b.best_i = i;
    }
  }
  b.terminal = main + model.evaluate(Q);
  return b;
}

}  // namespace near_misses
