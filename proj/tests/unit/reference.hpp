#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "near_misses/counting.hpp"

namespace near_misses::reference {

/// Straight enumeration of every a in a generous integer box around qD,
/// sharing nothing with the library's lattice slicing.
inline double naive_count(const MongeChart& chart, const CountQuery& q, std::int64_t* points = nullptr) {
  const Box& d = chart.domain_box();
  const std::size_t dim = d.dim();
  double total = 0.0;
  std::int64_t npts = 0;
  for (std::int64_t qq = 1; qq <= q.Q; ++qq) {
    std::vector<std::int64_t> lo(dim), hi(dim), a(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      lo[i] = static_cast<std::int64_t>(std::floor(d.lo()[i] * static_cast<double>(qq))) - 1;
      hi[i] = static_cast<std::int64_t>(std::ceil(d.hi()[i] * static_cast<double>(qq))) + 1;
    }
    a = lo;
    std::vector<double> x(dim);
    for (;;) {
      for (std::size_t i = 0; i < dim; ++i) x[i] = static_cast<double>(a[i]) / static_cast<double>(qq);
      if (chart.contains(x)) {
        double w = 1.0;
        bool keep = true;
        if (q.mode == CountMode::kWeighted) {
          w = (*q.weight)(x);
          keep = w != 0.0;
        } else if (q.mode == CountMode::kIndicator) {
          keep = q.region->contains(x);
        }
        if (keep) {
          const double v = static_cast<double>(qq) * chart.value(x);
          const double dist = std::abs(v - std::round(v));
          const double a_v = std::abs(v);
          const double est = std::max(q.tie_epsilon, 4.0 * (std::nextafter(a_v, INFINITY) - a_v));
          const bool inside = q.strictness == Strictness::kStrict ? dist < q.delta : dist <= q.delta;
          if (inside || std::abs(dist - q.delta) <= est) {
            bool primitive = true;
            if (q.coprime) {
              std::int64_t g = qq;
              for (auto v2 : a) g = std::gcd(g, v2 < 0 ? -v2 : v2);
              const auto b = static_cast<std::int64_t>(std::round(v));
              g = std::gcd(g, b < 0 ? -b : b);
              primitive = g == 1;
            }
            if (primitive) {
              total += w;
              ++npts;
            }
          }
        }
      }
      std::size_t axis = dim;
      bool done = true;
      while (axis > 0) {
        --axis;
        if (a[axis] < hi[axis]) {
          ++a[axis];
          done = false;
          break;
        }
        a[axis] = lo[axis];
      }
      if (done) break;
    }
  }
  if (points) *points = npts;
  return total;
}

}  // namespace near_misses::reference
