#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace near_misses {

template <typename T>
struct QuadResult {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t panels = 0;
  bool converged = false;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule, nodes in descending order.
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208932299524, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z.real()) + std::abs(z.imag()); }

template <typename T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T> gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T kron = fc * kWgk[10];
  T gauss{};
  double resabs = magnitude(fc) * kWgk[10];
  T fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    kron += (fv1[j] + fv2[j]) * kWgk[j];
    resabs += (magnitude(fv1[j]) + magnitude(fv2[j])) * kWgk[j];
    if (j % 2 == 1) gauss += (fv1[j] + fv2[j]) * kWg[j / 2];
  }
  const T mean = kron * 0.5;
  double resasc = magnitude(fc - mean) * kWgk[10];
  for (int j = 0; j < 10; ++j) {
    resasc += (magnitude(fv1[j] - mean) + magnitude(fv2[j] - mean)) * kWgk[j];
  }
  const double ah = std::abs(h);
  resabs *= ah;
  resasc *= ah;
  double err = magnitude((kron - gauss) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, kron * h, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21 point) integration of f over [a, b].
/// Bisects the panel with the largest error estimate until the summed
/// estimate meets max(abs_tol, rel_tol |I|) or `max_panels` is exhausted.
template <typename T, typename F>
QuadResult<T> integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                 std::size_t max_panels, std::size_t initial_panels = 1) {
  QuadResult<T> out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  initial_panels = std::max<std::size_t>(1, initial_panels);
  std::priority_queue<detail::Panel<T>> heap;
  const double w = (b - a) / static_cast<double>(initial_panels);
  for (std::size_t i = 0; i < initial_panels; ++i) {
    const double lo = a + w * static_cast<double>(i);
    const double hi = i + 1 == initial_panels ? b : lo + w;
    heap.push(detail::gk21<T>(f, lo, hi));
  }
  out.evaluations = 21 * initial_panels;
  auto totals = [&heap]() {
    auto copy = heap;
    T v{};
    double e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair<T, double>{v, e};
  };
  T value{};
  double error = 0.0;
  {
    auto [v, e] = totals();
    value = v;
    error = e;
  }
  std::size_t panels = initial_panels;
  while (error > std::max(abs_tol, rel_tol * detail::magnitude(value)) && panels < max_panels) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    auto left = detail::gk21<T>(f, worst.a, mid);
    auto right = detail::gk21<T>(f, mid, worst.b);
    out.evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
    if (panels % 64 == 0) {
      auto [v, e] = totals();
      value = v;
      error = e;
    }
  }
  auto [v, e] = totals();
  out.value = v;
  out.error = e;
  out.panels = panels;
  out.converged = e <= std::max(abs_tol, rel_tol * detail::magnitude(v));
  return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

}  // namespace near_misses
