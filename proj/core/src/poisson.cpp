#include <algorithm>
#include <cmath>
#include <limits>

#include "near_misses/error.hpp"
#include "near_misses/oscillatory.hpp"
#include "tensor_rule.hpp"

namespace near_misses {

namespace {

struct Batch {
  std::vector<std::int64_t> k_lo;
  std::vector<std::int64_t> k_hi;
  std::vector<Complex> values;  // lexicographic in k, last axis fastest
};

std::size_t box_count(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) n *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  return n;
}

// Multiply-adds in batch_integrals for the high-order rule.
double separable_cost(const std::vector<std::vector<double>>& edges, const std::vector<std::int64_t>& klo,
                      const std::vector<std::int64_t>& khi) {
  std::vector<double> nodes, ks;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    nodes.push_back(static_cast<double>((edges[i].size() - 1) * detail::kHighOrder));
    ks.push_back(static_cast<double>(khi[i] - klo[i] + 1));
  }
  if (edges.size() == 1) return nodes[0] * ks[0];
  return nodes[0] * nodes[1] * (1.0 + ks[1]) + ks[0] * ks[1] * nodes[0];
}

// phase table E[k][n] = e(-q k x_n)
std::vector<std::vector<Complex>> frequency_table(const detail::AxisRule& rule, std::int64_t q, std::int64_t klo,
                                                  std::int64_t khi) {
  std::vector<std::vector<Complex>> t;
  for (std::int64_t k = klo; k <= khi; ++k) {
    std::vector<Complex> row(rule.nodes.size());
    const double s = -static_cast<double>(q) * static_cast<double>(k);
    for (std::size_t n = 0; n < rule.nodes.size(); ++n) row[n] = unit_phase(s * rule.nodes[n]);
    t.push_back(std::move(row));
  }
  return t;
}

// All I(j, k; q) for k in the box with one tensor rule, separably in k.
std::vector<Complex> batch_integrals(const MongeChart& chart, const Weight& w, std::int64_t j, std::int64_t q,
                                     const std::vector<std::int64_t>& klo, const std::vector<std::int64_t>& khi,
                                     const std::vector<detail::AxisRule>& rules) {
  const std::size_t d = rules.size();
  const double qj = static_cast<double>(q) * static_cast<double>(j);
  if (d == 1) {
    const auto& r = rules[0];
    std::vector<Complex> a(r.nodes.size());
    std::vector<double> x(1);
    for (std::size_t n = 0; n < r.nodes.size(); ++n) {
      x[0] = r.nodes[n];
      const double wx = w(x);
      a[n] = wx == 0.0 ? Complex{} : (wx * r.weights[n]) * unit_phase(qj * chart.value(x));
    }
    const auto table = frequency_table(r, q, klo[0], khi[0]);
    std::vector<Complex> out;
    for (const auto& row : table) {
      Complex s{};
      for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * row[n];
      out.push_back(s);
    }
    return out;
  }
  // d == 2: G(x1, k2) = sum_x2 A(x1, x2) e(-q k2 x2); I(k1, k2) = sum_x1 e(-q k1 x1) G(x1, k2)
  const auto& r1 = rules[0];
  const auto& r2 = rules[1];
  const auto t1 = frequency_table(r1, q, klo[0], khi[0]);
  const auto t2 = frequency_table(r2, q, klo[1], khi[1]);
  const std::size_t k2n = t2.size();
  std::vector<Complex> g(r1.nodes.size() * k2n);
  std::vector<Complex> row(r2.nodes.size());
  std::vector<double> x(2);
  for (std::size_t n1 = 0; n1 < r1.nodes.size(); ++n1) {
    x[0] = r1.nodes[n1];
    bool any = false;
    for (std::size_t n2 = 0; n2 < r2.nodes.size(); ++n2) {
      x[1] = r2.nodes[n2];
      const double wx = w(x);
      if (wx == 0.0) {
        row[n2] = {};
        continue;
      }
      any = true;
      row[n2] = (wx * r1.weights[n1] * r2.weights[n2]) * unit_phase(qj * chart.value(x));
    }
    if (!any) continue;
    for (std::size_t k2 = 0; k2 < k2n; ++k2) {
      Complex s{};
      const auto& e = t2[k2];
      for (std::size_t n2 = 0; n2 < row.size(); ++n2) s += row[n2] * e[n2];
      g[n1 * k2n + k2] = s;
    }
  }
  std::vector<Complex> out(t1.size() * k2n);
  for (std::size_t k1 = 0; k1 < t1.size(); ++k1) {
    for (std::size_t k2 = 0; k2 < k2n; ++k2) {
      Complex s{};
      for (std::size_t n1 = 0; n1 < r1.nodes.size(); ++n1) s += t1[k1][n1] * g[n1 * k2n + k2];
      out[k1 * k2n + k2] = s;
    }
  }
  return out;
}

}  // namespace

PoissonCheck poisson_check(const MongeChart& chart, const Weight& w, std::int64_t j, std::int64_t q,
                           std::optional<std::int64_t> truncation, double tail_target, double quad_tol) {
  const std::size_t d = chart.dim();
  if (d < 1 || d > 2) throw UnsupportedError("poisson_check: only n = 2 and n = 3 are supported");
  if (j < 1 || q < 1) throw InvalidQuery("poisson_check: j and q must be positive");
  if (truncation && *truncation < 0) throw InvalidQuery("poisson_check: truncation must be >= 0");
  if (w.dim() != d) throw InvalidQuery("poisson_check: weight dimension mismatch");
  const Box& box = w.support_box();
  if (!chart.domain_box().strictly_contains(box)) {
    throw InvalidQuery("poisson_check: weight support must lie strictly inside the domain");
  }

  // Bounding box of j grad f over the support: the frequencies near jV.
  std::vector<double> glo(d, std::numeric_limits<double>::infinity());
  std::vector<double> ghi(d, -std::numeric_limits<double>::infinity());
  {
    GridSpec grid;
    grid.per_axis = d == 1 ? 513 : 65;
    grid.region = Box(box.lo(), box.hi());
    for (const auto& p : grid_points(chart, grid)) {
      const Eigen::VectorXd g = chart.gradient(p);
      for (std::size_t i = 0; i < d; ++i) {
        glo[i] = std::min(glo[i], static_cast<double>(j) * g(static_cast<Eigen::Index>(i)));
        ghi[i] = std::max(ghi[i], static_cast<double>(j) * g(static_cast<Eigen::Index>(i)));
      }
    }
  }

  PoissonCheck out;
  out.lattice_sum = weighted_exponential_sum(chart, w, j, q);
  const double qpow = std::pow(static_cast<double>(q), static_cast<double>(d));
  const auto low = gauss_legendre(detail::kLowOrder);
  const auto high = gauss_legendre(detail::kHighOrder);

  std::int64_t K = truncation ? *truncation : 2;
  for (int round = 0;; ++round) {
    std::vector<std::int64_t> klo(d), khi(d);
    for (std::size_t i = 0; i < d; ++i) {
      klo[i] = static_cast<std::int64_t>(std::floor(glo[i])) - K;
      khi[i] = static_cast<std::int64_t>(std::ceil(ghi[i])) + K;
    }
    const std::size_t nk = box_count(klo, khi);
    detail::PhaseSpec phase{q, j, klo, khi};
    const auto rate = detail::phase_rate_profile(chart, box, phase, detail::bins_for_dim(d));
    std::vector<std::vector<double>> edges;
    for (std::size_t i = 0; i < d; ++i) {
      edges.push_back(detail::panel_edges(box.lo()[i], box.hi()[i], rate[i], detail::kCyclesPerPanel,
                                          detail::kMinPanels));
    }
    if (separable_cost(edges, klo, khi) > 2e10) {
      throw BudgetError("poisson_check: dual sum exceeds the evaluation budget");
    }

    std::vector<Complex> lo_vals, hi_vals;
    double worst = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 6; ++level) {
      std::vector<detail::AxisRule> rl, rh;
      for (const auto& e : edges) {
        rl.push_back(detail::composite_rule(e, low));
        rh.push_back(detail::composite_rule(e, high));
      }
      lo_vals = batch_integrals(chart, w, j, q, klo, khi, rl);
      hi_vals = batch_integrals(chart, w, j, q, klo, khi, rh);
      worst = 0.0;
      for (std::size_t m = 0; m < nk; ++m) worst = std::max(worst, std::abs(hi_vals[m] - lo_vals[m]));
      if (worst <= quad_tol) break;
      for (auto& e : edges) e = detail::bisect(e);
    }

    // Decay constant calibrated on the outer shell: |I| <= C lambda1^-4.
    double c_shell = 0.0;
    std::vector<std::int64_t> k(klo);
    for (std::size_t m = 0; m < nk; ++m) {
      bool shell = false;
      double dist2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        if (k[i] == klo[i] || k[i] == khi[i]) shell = true;
        const double kd = static_cast<double>(k[i]);
        const double gap = kd < glo[i] ? glo[i] - kd : (kd > ghi[i] ? kd - ghi[i] : 0.0);
        dist2 += gap * gap;
      }
      if (shell && dist2 > 0.0) {
        const double lambda1 = static_cast<double>(q) * std::sqrt(dist2);
        c_shell = std::max(c_shell, std::abs(hi_vals[m]) * std::pow(lambda1, 4.0));
      }
      for (std::size_t i = d; i-- > 0;) {
        if (k[i] < khi[i]) {
          ++k[i];
          break;
        }
        k[i] = klo[i];
      }
    }
    // Sum of lambda1^-4 over the lattice outside the box, shell by shell.
    double gap_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
      gap_min = std::min(gap_min, static_cast<double>(khi[i] + 1) - ghi[i]);
      gap_min = std::min(gap_min, glo[i] - static_cast<double>(klo[i] - 1));
    }
    double outside = 0.0;
    for (std::int64_t s = 1; s <= 200000; ++s) {
      double inner = 1.0, outer = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double width = static_cast<double>(khi[i] - klo[i] + 1);
        outer *= width + 2.0 * static_cast<double>(s);
        inner *= width + 2.0 * static_cast<double>(s - 1);
      }
      const double r = static_cast<double>(q) * (gap_min + static_cast<double>(s - 1));
      outside += (outer - inner) * std::pow(r, -4.0);
    }
    out.tail_estimate = qpow * c_shell * outside;
    out.truncation = K;
    out.k_lo = klo;
    out.k_hi = khi;
    out.terms = nk;
    if (truncation || out.tail_estimate <= tail_target) {
      CompensatedSum<Complex> dual;
      for (const auto& v : hi_vals) dual.add(v);
      out.dual_sum = qpow * dual.value();
      out.quad_error = qpow * static_cast<double>(nk) * worst;
      out.residual = std::abs(out.lattice_sum - out.dual_sum);
      return out;
    }
    if (round >= 12) throw BudgetError("poisson_check: truncation tail did not fall below the target");
    K = K + std::max<std::int64_t>(2, K / 2);
  }
}

}  // namespace near_misses
