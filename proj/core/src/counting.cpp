#include "near_misses/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "near_misses/error.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/parallel.hpp"

namespace near_misses {

namespace {

struct AxisRange {
  std::int64_t lo;
  std::int64_t hi;
};

// Lattice range of q*D intersected with q*B (B optional, closed).
std::vector<AxisRange> ranges_for(const MongeChart& chart, const Box* clip, std::int64_t q) {
  const Box& dom = chart.domain_box();
  std::vector<AxisRange> r(dom.dim());
  for (std::size_t i = 0; i < dom.dim(); ++i) {
    auto [lo, hi] = dom.lattice_range(i, q);
    if (clip) {
      const auto [clo, chi] = clip->lattice_range(i, q);
      lo = std::max(lo, clo);
      hi = std::min(hi, chi);
    }
    r[i] = {lo, hi};
  }
  return r;
}

bool box_is_exact(const Box& box) {
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (!box.lattice_range_exact(i)) return false;
  }
  return true;
}

// Calls visit(a, x) for every lattice a in the ranges with a/q in the domain.
// Returns the number of lattice candidates scanned.
template <typename Visit>
std::int64_t scan_q(const MongeChart& chart, const Box* clip, std::int64_t q, bool exact_box, Visit&& visit) {
  const auto ranges = ranges_for(chart, clip, q);
  const std::size_t d = ranges.size();
  for (const auto& r : ranges) {
    if (r.lo > r.hi) return 0;
  }
  std::vector<std::int64_t> a(d);
  std::vector<double> x(d);
  const double qd = static_cast<double>(q);
  for (std::size_t i = 0; i < d; ++i) {
    a[i] = ranges[i].lo;
    x[i] = static_cast<double>(a[i]) / qd;
  }
  std::int64_t scanned = 0;
  for (;;) {
    ++scanned;
    const bool inside = exact_box ? chart.passes_refinement(x) : chart.contains(x);
    if (inside) visit(std::span<const std::int64_t>(a), std::span<const double>(x));
    // Lexicographic odometer, last axis fastest.
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (a[k] < ranges[k].hi) {
        ++a[k];
        x[k] = static_cast<double>(a[k]) / qd;
        break;
      }
      a[k] = ranges[k].lo;
      x[k] = static_cast<double>(a[k]) / qd;
      if (k == 0) return scanned;
    }
    if (d == 0) return scanned;
  }
}

std::vector<std::int64_t> descending(std::int64_t Q) {
  std::vector<std::int64_t> order(static_cast<std::size_t>(Q));
  for (std::int64_t i = 0; i < Q; ++i) order[static_cast<std::size_t>(i)] = Q - i;
  return order;
}

CountResult merge_ascending(std::vector<PerQ>& slots, const std::vector<std::int64_t>& scanned, bool keep) {
  CountResult r;
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    total.add(slots[i].subtotal);
    r.count += slots[i].count;
    r.ambiguous += slots[i].ambiguous;
    r.candidates_scanned += scanned[i];
  }
  r.total = total.value();
  if (keep) r.per_q = std::move(slots);
  return r;
}

const Box* clip_box(const CountQuery& query) {
  switch (query.mode) {
    case CountMode::kWeighted:
      return &query.weight->support_box();
    case CountMode::kIndicator:
      return &query.region->bounding_box();
    case CountMode::kUnweighted:
      break;
  }
  return nullptr;
}

CountResult count_impl(const MongeChart& chart, const CountQuery& query) {
  const Box* clip = clip_box(query);
  const bool exact_box = box_is_exact(chart.domain_box());
  const auto n = static_cast<std::size_t>(query.Q);
  std::vector<PerQ> slots(n);
  std::vector<std::int64_t> scanned(n, 0);
  const bool strict = query.strictness == Strictness::kStrict;
  const double delta = query.delta;

  parallel_for_each_index(descending(query.Q), query.threads, [&](std::int64_t q) {
    PerQ out;
    out.q = q;
    CompensatedSum<double> sum;
    const double qd = static_cast<double>(q);
    std::vector<std::int64_t> homog;
    scanned[static_cast<std::size_t>(q - 1)] =
        scan_q(chart, clip, q, exact_box, [&](std::span<const std::int64_t> a, std::span<const double> x) {
          double w = 1.0;
          if (query.mode == CountMode::kWeighted) {
            w = (*query.weight)(x);
            if (w == 0.0) return;
          } else if (query.mode == CountMode::kIndicator && !query.region->contains(x)) {
            return;
          }
          const double v = qd * chart.value(x);
          if (!std::isfinite(v)) return;
          const double b = std::nearbyint(v);
          const double dist = std::abs(v - b);
          const double est = std::max(query.tie_epsilon, 4.0 * ulp(v));
          const bool tie = std::abs(dist - delta) <= est;
          const bool inside = strict ? dist < delta : dist <= delta;
          if (!(inside || tie)) return;
          if (query.coprime) {
            homog.assign(a.begin(), a.end());
            homog.push_back(static_cast<std::int64_t>(b));
            homog.push_back(q);
            if (gcd_all(homog) != 1) return;
          }
          sum.add(w);
          ++out.count;
          if (tie) ++out.ambiguous;
        });
    out.subtotal = sum.value();
    slots[static_cast<std::size_t>(q - 1)] = out;
  });
  return merge_ascending(slots, scanned, query.keep_per_q);
}

}  // namespace

void validate_query(const MongeChart& chart, const CountQuery& query) {
  if (query.Q < 1) throw InvalidQuery("count: Q must be a positive integer");
  if (!(query.delta >= 0.0 && query.delta < 0.5)) throw InvalidQuery("count: delta must lie in [0, 1/2)");
  if (!(query.tie_epsilon >= 0.0)) throw InvalidQuery("count: tie_epsilon must be >= 0");
  if (query.threads < 1) throw InvalidQuery("count: threads must be >= 1");
  if (query.mode == CountMode::kWeighted) {
    if (!query.weight) throw InvalidQuery("count: weighted mode needs a weight");
    if (query.weight->dim() != chart.dim()) throw InvalidQuery("count: weight dimension mismatch");
    if (!chart.domain_box().strictly_contains(query.weight->support_box())) {
      throw InvalidQuery("count: weight support must lie strictly inside the domain");
    }
  }
  if (query.mode == CountMode::kIndicator) {
    if (!query.region) throw InvalidQuery("count: indicator mode needs a convex region");
    const Box& k = query.region->bounding_box();
    const Box& d = chart.domain_box();
    if (k.dim() != d.dim()) throw InvalidQuery("count: region dimension mismatch");
    for (std::size_t i = 0; i < d.dim(); ++i) {
      if (k.lo()[i] < d.lo()[i] || k.hi()[i] > d.hi()[i]) throw InvalidQuery("count: K must lie inside D");
    }
  }
}

CountResult count_near(const MongeChart& chart, const CountQuery& query) {
  validate_query(chart, query);
  return count_impl(chart, query);
}

CountResult count_on(const MongeChart& chart, std::int64_t Q, int threads) {
  if (Q < 1) throw InvalidQuery("count_on: Q must be a positive integer");
  if (!chart.exact()) throw UnsupportedError("count_on: chart '" + chart.name() + "' has no exact rational form");
  const ExactForm& form = *chart.exact();
  const bool exact_box = box_is_exact(chart.domain_box());
  const auto n = static_cast<std::size_t>(Q);
  std::vector<PerQ> slots(n);
  std::vector<std::int64_t> scanned(n, 0);
  parallel_for_each_index(descending(Q), threads, [&](std::int64_t q) {
    PerQ out;
    out.q = q;
    scanned[static_cast<std::size_t>(q - 1)] =
        scan_q(chart, nullptr, q, exact_box, [&](std::span<const std::int64_t> a, std::span<const double>) {
          if (form.scaled_integer(a, q)) ++out.count;
        });
    out.subtotal = static_cast<double>(out.count);
    slots[static_cast<std::size_t>(q - 1)] = out;
  });
  return merge_ascending(slots, scanned, true);
}

CoprimeResult count_coprime(const MongeChart& chart, const CountQuery& query) {
  validate_query(chart, query);
  CoprimeResult r;
  CountQuery direct = query;
  direct.coprime = true;
  r.direct = count_impl(chart, direct);

  const auto mu = mobius_table(query.Q);
  CompensatedSum<double> mob;
  for (std::int64_t d = 1; d <= query.Q; ++d) {
    const int m = mu[static_cast<std::size_t>(d)];
    if (m == 0) continue;
    CountQuery scaled = query;
    scaled.coprime = false;
    scaled.keep_per_q = false;
    scaled.Q = query.Q / d;
    scaled.delta = query.delta / static_cast<double>(d);
    mob.add(static_cast<double>(m) * count_impl(chart, scaled).total);
  }
  r.mobius_total = mob.value();
  r.discrepancy = std::abs(r.direct.total - r.mobius_total);
  if (query.Q <= 100) {
    r.cross_checked = true;
    const bool weighted = query.mode == CountMode::kWeighted;
    const double tol = weighted ? 1e-9 * std::max(1.0, std::abs(r.direct.total)) : 0.0;
    if (r.discrepancy > tol) {
      throw ContractViolation("count_coprime: direct count " + format_double(r.direct.total) +
                              " disagrees with Moebius inversion " + format_double(r.mobius_total));
    }
  }
  return r;
}

double main_term(const CountQuery& query, const MongeChart& chart) {
  const double n = static_cast<double>(chart.ambient_dim());
  const double scale = 2.0 / n * query.delta * std::pow(static_cast<double>(query.Q), n);
  switch (query.mode) {
    case CountMode::kWeighted:
      if (!query.weight) throw InvalidQuery("main_term: weighted mode needs a weight");
      return scale * query.weight->integral();
    case CountMode::kIndicator:
      if (!query.region) throw InvalidQuery("main_term: indicator mode needs a convex region");
      return scale * query.region->volume();
    case CountMode::kUnweighted:
      break;
  }
  throw InvalidQuery("main_term: no normalised main term in unweighted mode");
}

double weighted_point_total(const MongeChart& chart, const Weight& w, std::int64_t Q, int threads) {
  if (Q < 1) throw InvalidQuery("weighted_point_total: Q must be a positive integer");
  const bool exact_box = box_is_exact(chart.domain_box());
  std::vector<double> per(static_cast<std::size_t>(Q), 0.0);
  parallel_for_each_index(descending(Q), threads, [&](std::int64_t q) {
    CompensatedSum<double> sum;
    scan_q(chart, &w.support_box(), q, exact_box,
           [&](std::span<const std::int64_t>, std::span<const double> x) { sum.add(w(x)); });
    per[static_cast<std::size_t>(q - 1)] = sum.value();
  });
  CompensatedSum<double> total;
  for (double v : per) total.add(v);
  return total.value();
}

}  // namespace near_misses
