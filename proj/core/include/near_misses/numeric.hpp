#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace near_misses {

using Complex = std::complex<double>;

/// Neumaier-compensated accumulator. Deterministic for a fixed input order.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if constexpr (std::is_same_v<T, Complex>) {
      comp_ += Complex(two_sum_err(sum_.real(), x.real(), t.real()),
                       two_sum_err(sum_.imag(), x.imag(), t.imag()));
    } else {
      comp_ += two_sum_err(sum_, x, t);
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double two_sum_err(double a, double b, double s) {
    return std::abs(a) >= std::abs(b) ? (a - s) + b : (b - s) + a;
  }
  T sum_{};
  T comp_{};
};

/// e(x) = exp(2*pi*i*x), with the integer part of x removed before scaling.
inline Complex unit_phase(double x) {
  const double frac = x - std::floor(x);
  const double angle = 2.0 * std::numbers::pi * frac;
  return {std::cos(angle), std::sin(angle)};
}

/// Distance to the nearest integer.
inline double dist_to_int(double x) { return std::abs(x - std::nearbyint(x)); }

inline double ulp(double x) {
  const double a = std::abs(x);
  return std::nextafter(a, INFINITY) - a;
}

std::int64_t gcd_all(std::span<const std::int64_t> values);

/// Moebius function for 1 <= d <= n, sieved.
std::vector<int> mobius_table(std::int64_t n);

/// Shortest round-trip-safe decimal: 17 significant digits.
std::string format_double(double x);

}  // namespace near_misses
