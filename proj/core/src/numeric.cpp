#include "near_misses/numeric.hpp"

#include <cstdio>
#include <numeric>

namespace near_misses {

std::int64_t gcd_all(std::span<const std::int64_t> values) {
  std::int64_t g = 0;
  for (std::int64_t v : values) g = std::gcd(g, v < 0 ? -v : v);
  return g;
}

std::vector<int> mobius_table(std::int64_t n) {
  std::vector<int> mu(static_cast<std::size_t>(n + 1), 1);
  std::vector<bool> composite(static_cast<std::size_t>(n + 1), false);
  if (n >= 0) mu[0] = 0;
  for (std::int64_t p = 2; p <= n; ++p) {
    if (composite[p]) continue;
    for (std::int64_t m = p; m <= n; m += p) {
      if (m > p) composite[m] = true;
      mu[m] = -mu[m];
    }
    const std::int64_t p2 = p * p;
    for (std::int64_t m = p2; m <= n; m += p2) mu[m] = 0;
  }
  return mu;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace near_misses
