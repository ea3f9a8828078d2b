#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "near_misses/geometry.hpp"
#include "near_misses/surfaces.hpp"
#include "near_misses/weights.hpp"

namespace near_misses {

enum class CountMode { kWeighted, kIndicator, kUnweighted };
enum class Strictness { kStrict, kNonstrict };

struct CountQuery {
  std::int64_t Q = 1;
  double delta = 0.0;
  CountMode mode = CountMode::kUnweighted;
  WeightPtr weight;                    // kWeighted
  std::optional<ConvexRegion> region;  // kIndicator
  bool coprime = false;
  Strictness strictness = Strictness::kStrict;
  double tie_epsilon = 0.0;
  bool keep_per_q = true;
  int threads = 1;
};

struct PerQ {
  std::int64_t q = 0;
  double subtotal = 0.0;
  std::int64_t count = 0;
  std::int64_t ambiguous = 0;
};

/// Mergeable outcome. `total` is the weighted sum in weighted mode and the
/// point count otherwise; `count` always counts accepted points.
struct CountResult {
  double total = 0.0;
  std::int64_t count = 0;
  std::int64_t ambiguous = 0;
  std::int64_t candidates_scanned = 0;
  std::vector<PerQ> per_q;  // ascending q
};

/// Pairs (a, q), q <= Q, a/q in the chart domain, with ||q f(a/q)|| below
/// delta. Ties within max(tie_epsilon, 4 ulp) of delta are included and
/// tallied in `ambiguous`. Independent of thread count.
CountResult count_near(const MongeChart& chart, const CountQuery& query);

/// Pairs (a, q), q <= Q, with q f(a/q) an integer, decided exactly.
/// per_q holds per-denominator counts, so prefix sums give every Q' <= Q.
CountResult count_on(const MongeChart& chart, std::int64_t Q, int threads = 1);

struct CoprimeResult {
  CountResult direct;
  double mobius_total = 0.0;
  /// |direct - mobius| (0 expected in unweighted/indicator modes).
  double discrepancy = 0.0;
  bool cross_checked = false;
};

/// Primitive representatives only, gcd(a, b, q) = 1 with b the nearest
/// integer to q f(a/q). Also evaluates sum_d mu(d) N(Q/d, delta/d) and, for
/// Q <= 100, throws ContractViolation if the two disagree.
CoprimeResult count_coprime(const MongeChart& chart, const CountQuery& query);

/// (2 w^(0)/n) delta Q^n or (2|K|/n) delta Q^n.
double main_term(const CountQuery& query, const MongeChart& chart);

/// sum_{q <= Q} sum_a w(a/q).
double weighted_point_total(const MongeChart& chart, const Weight& w, std::int64_t Q, int threads = 1);

void validate_query(const MongeChart& chart, const CountQuery& query);

}  // namespace near_misses
