#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "near_misses/bootstrap.hpp"
#include "near_misses/counting.hpp"
#include "near_misses/exact.hpp"
#include "near_misses/stats.hpp"
#include "near_misses/surfaces.hpp"

namespace near_misses {

// ---------------------------------------------------------------- sweeps

struct DeltaRule {
  enum class Kind { kFixed, kPower, kFloor };
  Kind kind = Kind::kFixed;
  /// delta for kFixed, gamma for kPower (delta = Q^-gamma), epsilon for kFloor
  /// (delta = Q^{-1+epsilon}).
  double value = 0.0;

  static DeltaRule fixed(double delta) { return {Kind::kFixed, delta}; }
  static DeltaRule power(double gamma) { return {Kind::kPower, gamma}; }
  static DeltaRule floor(double epsilon) { return {Kind::kFloor, epsilon}; }

  double delta_for(std::int64_t Q) const;
  std::string describe() const;
};

/// Parses "fixed:0.1", "power:0.5" or "floor:0.2"; a bare number is fixed.
DeltaRule parse_delta_rule(const std::string& text);

struct SweepSpec {
  std::shared_ptr<const MongeChart> chart;
  CountMode mode = CountMode::kWeighted;
  WeightPtr weight;
  std::optional<ConvexRegion> region;
  std::vector<std::int64_t> Q_list;
  DeltaRule delta_rule;
  /// Weighted mode only: extra runs with the bump centre jittered by a seeded
  /// generator; the row reports the mean.
  int repetitions = 1;
  std::uint64_t seed = 1;
  /// Enforce delta > Q^{-1+epsilon} for some epsilon > 0 on every row.
  bool require_floor = false;
  Strictness strictness = Strictness::kStrict;
  int threads = 1;
};

struct SweepRow {
  std::int64_t Q = 0;
  double delta = 0.0;
  double count = 0.0;
  /// Absent when delta = 0 or no main term exists.
  std::optional<double> main_term;
  std::optional<double> ratio;
  std::optional<double> residual;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  /// log|residual| against log Q, when at least two residuals are nonzero.
  std::optional<GrowthFit> residual_fit;
};

SweepTable asymptotic_sweep(const SweepSpec& spec);

/// Header Q,delta,count,main_term,ratio,residual; undefined cells left empty.
std::string sweep_csv(const SweepTable& table);

struct BoundShapeRow {
  std::int64_t Q = 0;
  double delta = 0.0;
  double count = 0.0;
  double envelope = 0.0;  // delta Q^n + E_n(Q)
  double ratio = 0.0;     // count / envelope
};

struct BoundShapeReport {
  ErrorTermModel model;
  double C = 0.0;            // max ratio over the calibration rows
  std::size_t calibration_rows = 0;
  double worst_slack = 0.0;  // max ratio / C over all rows
  bool holds = false;        // worst_slack <= tolerance
  std::vector<BoundShapeRow> rows;
};

/// Fits the error-term shape on the measured counts, calibrates the constant
/// C on the first half of the rows (by Q), and checks the remaining rows stay
/// below tolerance * C * (delta Q^n + E_n(Q)).
BoundShapeReport bound_shape_check(std::size_t n, const std::vector<SweepRow>& rows,
                                   std::optional<ErrorTermModel> model = std::nullopt, double tolerance = 1.5);

/// Inner and outer plateau weights around the box K and the indicator count
/// between them.
struct PlateauSandwich {
  double lower = 0.0;
  double indicator = 0.0;
  double upper = 0.0;
  bool ordered = false;
};

PlateauSandwich plateau_sandwich(const MongeChart& chart, const Box& K, double ramp, std::int64_t Q, double delta,
                                 int threads = 1);

// ------------------------------------------------------ dimension growth

/// m-dimensional chart x -> (x, f_1(x), ..., f_k(x)) with exact components.
/// A projection direction u = s/r needs every component to be a polynomial
/// unless k = 1.
struct PropertyPManifold {
  std::string name;
  Box domain;
  std::vector<ExactForm> components;
  std::optional<std::vector<std::int64_t>> witness_s;
  std::int64_t witness_r = 1;

  std::size_t dim() const { return domain.dim(); }
  std::size_t codim() const { return components.size(); }
  std::size_t ambient_dim() const { return dim() + codim(); }
};

PropertyPManifold parabola_manifold();
PropertyPManifold circle_manifold();
/// (t, t^2, t^3) on [1/10, 9/10]
PropertyPManifold twisted_cubic_manifold();
/// (x, y, x^2 + y^2, x y) on [1/10, 9/10]^2
PropertyPManifold quadric_pair_manifold();

struct ProjectionWitness {
  std::vector<std::int64_t> s;
  std::int64_t r = 1;
  double min_abs_det = 0.0;
};

/// Uses the manifold's witness if set, otherwise searches r = 1..max_r.
/// Throws CurvatureError when no direction works.
ProjectionWitness find_witness(const PropertyPManifold& manifold, std::int64_t max_r = 50);

/// Hypersurface graph of u . f over the manifold's domain.
MongeChart projected_chart(const PropertyPManifold& manifold, const ProjectionWitness& witness);

/// Pairs (a, q), q <= B, with q f_i(a/q) integral for every component.
std::int64_t count_manifold_points(const PropertyPManifold& manifold, std::int64_t B, int threads = 1);

struct DimensionGrowthRow {
  std::int64_t B = 0;
  std::int64_t count = 0;
  std::int64_t bound_count = 0;  // N_S(B r, 0)
};

struct DimensionGrowthReport {
  ProjectionWitness witness;
  std::vector<DimensionGrowthRow> rows;
  bool dominated = false;
  std::optional<GrowthFit> growth;
  bool exponent_ok = false;  // slope <= dim + slack
};

DimensionGrowthReport dimension_growth_count(const PropertyPManifold& manifold, const std::vector<std::int64_t>& Bs,
                                             int threads = 1, double slack = 0.2);

/// Header B,count,bound_count.
std::string dimension_growth_csv(const DimensionGrowthReport& report);

// -------------------------------------------------------- Robert-Sargos

/// Quadruples in [M+1, 2M]^4 with |m1^a + m2^a - m3^a - m4^a| <= delta M^{a-1}.
std::int64_t robert_sargos_count(std::int64_t M, double delta, double alpha);
/// O(M^4) reference with the same floating-point comparisons.
std::int64_t robert_sargos_bruteforce(std::int64_t M, double delta, double alpha);

struct RobertSargosRow {
  std::int64_t M = 0;
  double delta = 0.0;
  double alpha = 0.0;
  std::int64_t count = 0;
};

/// Header M,delta,alpha,count.
std::string robert_sargos_csv(const std::vector<RobertSargosRow>& rows);

// ------------------------------------------------- metric approximation

struct ApproxFunction {
  enum class Family { kPower, kLog, kCustom };
  Family family = Family::kPower;
  double scale = 1.0;   // kPower: scale * q^-nu
  double nu = 1.0;
  double lambda = 0.0;  // kLog: q^-1 (log q)^-lambda, from q = 2
  std::function<double(double)> custom;
  /// When set, values are raised to at least q^{-1+eta}.
  std::optional<double> clamp_eta;

  static ApproxFunction power(double nu, double scale = 1.0);
  static ApproxFunction log_power(double lambda);
  static ApproxFunction constant(double value) { return power(0.0, value); }

  double operator()(double q) const;
  std::int64_t first_q() const { return family == Family::kLog ? 2 : 1; }
  std::string describe() const;
};

struct ConvergenceRow {
  std::int64_t q_max = 0;
  double partial_sum = 0.0;
  std::string verdict;
};

struct ConvergenceReport {
  /// "converges", "diverges" or "inconclusive"
  std::string verdict;
  bool symbolic = false;
  bool below_threshold = false;  // s <= (n-1)/2
  double tail_estimate = 0.0;    // infinite when the local decay is too slow
  std::vector<ConvergenceRow> rows;
};

/// sum_q psi(q)^{s+1} q^{n-1-s}: exponent comparison for the catalog
/// families, partial sums at q_max = 10, 100, ..., max_q.
ConvergenceReport da_convergence_check(const ApproxFunction& psi, double s, int n, std::int64_t max_q = 1'000'000);

/// Header q_max,partial_sum,verdict.
std::string convergence_csv(const ConvergenceReport& report);

struct DyadicRow {
  int i = 0;
  double threshold = 0.0;  // c4 psi(2^i), capped at 1/2
  std::int64_t count = 0;
  double ratio = 0.0;      // count / (psi(2^i) 2^{n i})
};

struct DyadicReport {
  double c3 = 0.0;  // measured Lipschitz constant
  double c4 = 0.0;  // 1 + c3 sqrt(n-1)
  std::vector<DyadicRow> rows;
  double ratio_slope = 0.0;  // slope of log2(ratio) against i
  bool bounded = false;
};

/// Counts (a, q) with 2^i <= q < 2^{i+1} and ||q f(a/q)|| <= c4 psi(2^i).
DyadicReport da_dyadic_count_check(const MongeChart& chart, const ApproxFunction& psi, int i_lo, int i_hi,
                                   int threads = 1, double budget = 2e9);

// ---------------------------------------------------------------- misc

struct GrowthEstimate {
  double slope = 0.0;
  double stderr_ = 0.0;
  std::size_t points = 0;
  std::size_t filtered = 0;
};

/// Slope of log y against log x; needs >= 4 points with x positive and
/// strictly increasing. Points with y <= 0 are dropped.
GrowthEstimate growth_exponent(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace near_misses
