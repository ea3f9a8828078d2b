#include "near_misses/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "near_misses/counting.hpp"
#include "near_misses/error.hpp"
#include "near_misses/oscillatory.hpp"

namespace near_misses {

namespace {

constexpr double kPi = std::numbers::pi;

// Vaaler's weight: phi(t) = pi t (1 - |t|) cot(pi t) + |t| on 0 < |t| < 1.
double vaaler_phi(double t) {
  const double a = std::abs(t);
  return kPi * a * (1.0 - a) / std::tan(kPi * a) + a;
}

double frac(double x) { return x - std::floor(x); }

bool in_interval_mod1(double x, double a, double b) {
  // [a, b] with b - a < 1, taken mod 1.
  const double t = frac(x - a);
  return t <= b - a;
}

}  // namespace

double fejer_series(std::int64_t J, double theta) {
  if (J < 1) throw InvalidQuery("fejer: J must be positive");
  const double jd = static_cast<double>(J);
  double s = 1.0 / jd;
  for (std::int64_t j = 1; j < J; ++j) {
    s += 2.0 * (jd - static_cast<double>(j)) / (jd * jd) * std::cos(2.0 * kPi * static_cast<double>(j) * frac(theta));
  }
  return s;
}

double fejer_eval(std::int64_t J, double theta) {
  if (J < 1) throw InvalidQuery("fejer: J must be positive");
  const double t = frac(theta);
  const double s = std::sin(kPi * t);
  if (std::abs(s) < 1e-8) return fejer_series(J, theta);
  const double r = std::sin(kPi * static_cast<double>(J) * t) / (static_cast<double>(J) * s);
  return r * r;
}

double fejer_coefficient(std::int64_t J, std::int64_t j) {
  if (J < 1) throw InvalidQuery("fejer: J must be positive");
  const std::int64_t a = j < 0 ? -j : j;
  if (a >= J) return 0.0;
  const double jd = static_cast<double>(J);
  return (jd - static_cast<double>(a)) / (jd * jd);
}

bool fejer_majorization(std::int64_t J, double delta, double theta) {
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidQuery("fejer_majorization: delta must lie in (0, 1/2)");
  if (J != static_cast<std::int64_t>(std::floor(1.0 / (2.0 * delta)))) {
    throw InvalidQuery("fejer_majorization: J must equal floor(1/(2 delta))");
  }
  if (dist_to_int(theta) > delta) return true;
  return kPi * kPi / 4.0 * fejer_eval(J, theta) >= 1.0;
}

SelbergPair::SelbergPair(std::int64_t J, double alpha, double beta) : J_(J), alpha_(alpha), beta_(beta) {
  if (J < 1) throw InvalidQuery("selberg_pair: J must be positive");
  if (!(alpha < beta && beta < alpha + 1.0)) throw InvalidQuery("selberg_pair: need alpha < beta < alpha + 1");
  const double j1 = static_cast<double>(J) + 1.0;
  // B(h): Vaaler's majorant of the sawtooth, including the Fejer correction.
  auto b_hat = [&](std::int64_t h) -> Complex {
    const double real = (1.0 - std::abs(static_cast<double>(h)) / j1) / (2.0 * j1);
    if (h == 0) return {real, 0.0};
    const double hd = static_cast<double>(h);
    // -phi(h/(J+1)) / (2 pi i h) = i phi / (2 pi h)
    return {real, vaaler_phi(hd / j1) / (2.0 * kPi * hd)};
  };
  plus_.resize(static_cast<std::size_t>(2 * J + 1));
  minus_.resize(static_cast<std::size_t>(2 * J + 1));
  for (std::int64_t h = -J; h <= J; ++h) {
    const double hd = static_cast<double>(h);
    const Complex ea = unit_phase(-hd * alpha);
    const Complex eb = unit_phase(-hd * beta);
    Complex p = b_hat(-h) * ea + b_hat(h) * eb;
    Complex m = -b_hat(h) * ea - b_hat(-h) * eb;
    if (h == 0) {
      p += beta - alpha;
      m += beta - alpha;
    }
    plus_[static_cast<std::size_t>(h + J)] = p;
    minus_[static_cast<std::size_t>(h + J)] = m;
  }
}

Complex SelbergPair::coeff_plus(std::int64_t h) const {
  if (h < -J_ || h > J_) return {};
  return plus_[static_cast<std::size_t>(h + J_)];
}

Complex SelbergPair::coeff_minus(std::int64_t h) const {
  if (h < -J_ || h > J_) return {};
  return minus_[static_cast<std::size_t>(h + J_)];
}

double SelbergPair::plus(double x) const {
  double s = coeff_plus(0).real();
  for (std::int64_t h = 1; h <= J_; ++h) s += 2.0 * (coeff_plus(h) * unit_phase(static_cast<double>(h) * x)).real();
  return s;
}

double SelbergPair::minus(double x) const {
  double s = coeff_minus(0).real();
  for (std::int64_t h = 1; h <= J_; ++h) s += 2.0 * (coeff_minus(h) * unit_phase(static_cast<double>(h) * x)).real();
  return s;
}

double SelbergPair::coefficient_bound(std::int64_t h) const {
  const double a = std::abs(static_cast<double>(h));
  return 1.0 / (static_cast<double>(J_) + 1.0) + std::min(beta_ - alpha_, 1.0 / (kPi * a));
}

SandwichReport validate_selberg(const SelbergPair& pair, std::size_t grid, double tol) {
  SandwichReport r;
  r.grid_points = grid;
  const double a = pair.alpha();
  const double b = pair.beta();
  for (std::size_t m = 0; m < grid; ++m) {
    const double x = static_cast<double>(m) / static_cast<double>(grid);
    if (dist_to_int(x - a) <= 1e-12 || dist_to_int(x - b) <= 1e-12) continue;
    const double chi = in_interval_mod1(x, a, b) ? 1.0 : 0.0;
    const double over = chi - pair.plus(x);
    const double under = pair.minus(x) - chi;
    const double excess = std::max(over, under);
    if (excess > r.worst_excess) {
      r.worst_excess = excess;
      r.worst_x = x;
    }
    if (excess > tol) ++r.violations;
  }
  const double j1 = static_cast<double>(pair.J()) + 1.0;
  r.zero_coeff_error = std::max(std::abs(pair.coeff_plus(0) - Complex(b - a + 1.0 / j1)),
                                std::abs(pair.coeff_minus(0) - Complex(b - a - 1.0 / j1)));
  r.worst_coeff_slack = -std::numeric_limits<double>::infinity();
  for (std::int64_t h = -pair.J(); h <= pair.J(); ++h) {
    if (h == 0) continue;
    const double bound = pair.coefficient_bound(h);
    r.worst_coeff_slack = std::max(r.worst_coeff_slack, std::abs(pair.coeff_plus(h)) - bound);
    r.worst_coeff_slack = std::max(r.worst_coeff_slack, std::abs(pair.coeff_minus(h)) - bound);
  }
  r.ok = r.violations == 0 && r.zero_coeff_error <= tol && r.worst_coeff_slack <= tol;
  return r;
}

SelbergPair selberg_pair(std::int64_t J, double alpha, double beta) {
  SelbergPair pair(J, alpha, beta);
  const auto rep = validate_selberg(pair);
  if (!rep.ok) {
    throw ContractViolation("selberg_pair: contract violated (worst sandwich excess " +
                            format_double(rep.worst_excess) + " at x = " + format_double(rep.worst_x) +
                            ", zero-coefficient error " + format_double(rep.zero_coeff_error) +
                            ", coefficient slack " + format_double(rep.worst_coeff_slack) + ")");
  }
  return pair;
}

DecompositionCheck selberg_decomposition_check(const MongeChart& chart, WeightPtr w, std::int64_t Q, double delta,
                                               std::int64_t J) {
  if (J < 1) throw InvalidQuery("decomposition: J must be positive");
  CountQuery query;
  query.Q = Q;
  query.delta = delta;
  query.mode = CountMode::kWeighted;
  query.weight = w;
  query.keep_per_q = false;
  DecompositionCheck c;
  c.weighted_count = count_near(chart, query).total;
  c.n0 = weighted_point_total(chart, *w, Q);
  c.lhs = std::abs(c.weighted_count - 2.0 * delta * c.n0);
  const double j1 = static_cast<double>(J) + 1.0;
  double s = 0.0;
  for (std::int64_t j = 1; j <= J; ++j) {
    CompensatedSum<Complex> e;
    for (std::int64_t q = 1; q <= Q; ++q) e.add(weighted_exponential_sum(chart, *w, j, q));
    const double mag = std::abs(e.value());
    c.exp_sums.push_back(mag);
    const double bj = 1.0 / j1 + std::min(2.0 * delta, 1.0 / (kPi * static_cast<double>(j)));
    s += bj * mag;
  }
  c.rhs = c.n0 / j1 + 2.0 * s;
  c.holds = c.lhs <= c.rhs;
  return c;
}

}  // namespace near_misses
