#include "near_misses/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "near_misses/error.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/parallel.hpp"

namespace near_misses {

namespace {

std::vector<std::int64_t> descending(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::int64_t q = hi; q >= lo; --q) out.push_back(q);
  return out;
}

bool box_exact(const Box& box) {
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (!box.lattice_range_exact(i)) return false;
  }
  return true;
}

// Calls visit(a, x) for every lattice point a/q of the box, in lexicographic
// order. Returns the number of candidates visited.
template <typename Visit>
std::int64_t for_each_lattice_point(const Box& box, std::int64_t q, bool exact, Visit&& visit) {
  const std::size_t d = box.dim();
  std::vector<std::int64_t> lo(d), hi(d), a(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::tie(lo[i], hi[i]) = box.lattice_range(i, q);
    if (lo[i] > hi[i]) return 0;
  }
  a = lo;
  std::vector<double> x(d);
  const double qd = static_cast<double>(q);
  std::int64_t visited = 0;
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) x[i] = static_cast<double>(a[i]) / qd;
    if (exact || box.contains(x)) {
      ++visited;
      visit(std::span<const std::int64_t>(a), std::span<const double>(x));
    }
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (a[axis] < hi[axis]) {
        ++a[axis];
        break;
      }
      a[axis] = lo[axis];
      if (axis == 0) return visited;
    }
  }
}

double estimated_lattice_points(const Box& box, std::int64_t q_lo, std::int64_t q_hi) {
  double total = 0.0;
  for (std::int64_t q = q_lo; q <= q_hi; ++q) {
    double p = 1.0;
    for (std::size_t i = 0; i < box.dim(); ++i) {
      const auto [lo, hi] = box.lattice_range(i, q);
      p *= static_cast<double>(std::max<std::int64_t>(0, hi - lo + 1));
    }
    total += p;
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------- sweeps

double DeltaRule::delta_for(std::int64_t Q) const {
  const double qd = static_cast<double>(Q);
  switch (kind) {
    case Kind::kFixed:
      return value;
    case Kind::kPower:
      return std::pow(qd, -value);
    case Kind::kFloor:
      return std::pow(qd, -1.0 + value);
  }
  return value;
}

std::string DeltaRule::describe() const {
  switch (kind) {
    case Kind::kFixed:
      return "fixed:" + format_double(value);
    case Kind::kPower:
      return "power:" + format_double(value);
    case Kind::kFloor:
      return "floor:" + format_double(value);
  }
  return {};
}

DeltaRule parse_delta_rule(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = colon == std::string::npos ? "fixed" : text.substr(0, colon);
  const std::string number = colon == std::string::npos ? text : text.substr(colon + 1);
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(number, &used);
    if (used != number.size()) throw std::invalid_argument(number);
  } catch (const std::exception&) {
    throw InvalidQuery("delta rule: cannot parse number in '" + text + "'");
  }
  if (kind == "fixed") return DeltaRule::fixed(v);
  if (kind == "power") {
    if (!(v > 0.0 && v < 1.0)) throw InvalidQuery("delta rule: power exponent must lie in (0, 1)");
    return DeltaRule::power(v);
  }
  if (kind == "floor") {
    if (!(v > 0.0 && v < 1.0)) throw InvalidQuery("delta rule: floor epsilon must lie in (0, 1)");
    return DeltaRule::floor(v);
  }
  throw InvalidQuery("delta rule: unknown kind '" + kind + "' (fixed, power, floor)");
}

SweepTable asymptotic_sweep(const SweepSpec& spec) {
  if (!spec.chart) throw InvalidQuery("sweep: no chart");
  if (spec.Q_list.empty()) throw InvalidQuery("sweep: empty Q list");
  if (spec.repetitions < 1) throw InvalidQuery("sweep: repetitions must be >= 1");
  for (std::size_t i = 1; i < spec.Q_list.size(); ++i) {
    if (spec.Q_list[i] <= spec.Q_list[i - 1]) throw InvalidQuery("sweep: Q list must be strictly increasing");
  }
  const MongeChart& chart = *spec.chart;
  // Weighted runs beyond the first move the bump centre by up to a quarter
  // radius per coordinate.
  std::vector<WeightPtr> weights{spec.weight};
  if (spec.mode == CountMode::kWeighted && spec.repetitions > 1) {
    const auto* bump = dynamic_cast<const BumpWeight*>(spec.weight.get());
    if (bump == nullptr) throw InvalidQuery("sweep: repetitions need a bump weight");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    for (int r = 1; r < spec.repetitions; ++r) {
      std::vector<double> c = bump->center();
      for (double& v : c) v += jitter(rng) * bump->radius();
      weights.push_back(std::make_shared<BumpWeight>(std::move(c), bump->radius()));
    }
  }

  SweepTable table;
  for (std::int64_t Q : spec.Q_list) {
    const double delta = spec.delta_rule.delta_for(Q);
    if (!(delta >= 0.0 && delta < 0.5)) {
      throw InvalidQuery("sweep: delta = " + format_double(delta) + " at Q = " + std::to_string(Q) +
                         " is outside [0, 1/2)");
    }
    if (spec.require_floor) {
      const bool ok = spec.delta_rule.kind == DeltaRule::Kind::kFixed ? delta * static_cast<double>(Q) > 1.0
                      : spec.delta_rule.kind == DeltaRule::Kind::kPower ? spec.delta_rule.value < 1.0
                                                                        : spec.delta_rule.value > 0.0;
      if (!ok) throw InvalidQuery("sweep: delta must exceed Q^{-1+eps} for a floor-respecting sweep");
    }
    SweepRow row;
    row.Q = Q;
    row.delta = delta;
    CompensatedSum<double> acc;
    std::optional<double> main;
    for (const WeightPtr& w : weights) {
      CountQuery query;
      query.Q = Q;
      query.delta = delta;
      query.mode = spec.mode;
      query.weight = w;
      query.region = spec.region;
      query.strictness = spec.strictness;
      query.keep_per_q = false;
      query.threads = spec.threads;
      acc.add(count_near(chart, query).total);
      if (delta > 0.0 && !main) {
        CountQuery mq = query;
        if (mq.mode == CountMode::kUnweighted) {
          mq.mode = CountMode::kIndicator;
          mq.region = ConvexRegion(chart.domain_box());
        }
        main = main_term(mq, chart);
      }
    }
    row.count = acc.value() / static_cast<double>(weights.size());
    if (main && *main > 0.0) {
      row.main_term = main;
      row.ratio = row.count / *main;
      row.residual = row.count - *main;
    }
    table.rows.push_back(row);
  }

  std::vector<double> qs, res;
  for (const auto& r : table.rows) {
    if (r.residual && *r.residual != 0.0) {
      qs.push_back(static_cast<double>(r.Q));
      res.push_back(std::abs(*r.residual));
    }
  }
  if (qs.size() >= 2) table.residual_fit = loglog_fit(qs, res);
  return table;
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "Q,delta,count,main_term,ratio,residual\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : table.rows) {
    out << r.Q << ',' << format_double(r.delta) << ',' << format_double(r.count) << ',' << opt(r.main_term) << ','
        << opt(r.ratio) << ',' << opt(r.residual) << '\n';
  }
  return out.str();
}

BoundShapeReport bound_shape_check(std::size_t n, const std::vector<SweepRow>& rows,
                                   std::optional<ErrorTermModel> model, double tolerance) {
  if (rows.empty()) throw InvalidQuery("bound_shape_check: no rows");
  const int ni = static_cast<int>(n);
  BoundShapeReport rep;
  if (model) {
    rep.model = *model;
  } else {
    std::vector<double> qs, excess;
    for (const auto& r : rows) {
      const double qd = static_cast<double>(r.Q);
      qs.push_back(qd);
      excess.push_back(r.count - r.delta * std::pow(qd, ni));
    }
    rep.model = fit_error_term(ni, qs, excess);
  }
  std::vector<std::int64_t> sorted_q;
  for (const auto& r : rows) {
    const double qd = static_cast<double>(r.Q);
    BoundShapeRow b;
    b.Q = r.Q;
    b.delta = r.delta;
    b.count = r.count;
    b.envelope = r.delta * std::pow(qd, ni) + rep.model.evaluate(qd);
    b.ratio = b.count / b.envelope;
    rep.rows.push_back(b);
    sorted_q.push_back(r.Q);
  }
  std::sort(sorted_q.begin(), sorted_q.end());
  const std::int64_t cutoff = sorted_q[(sorted_q.size() - 1) / 2];
  for (const auto& b : rep.rows) {
    if (b.Q <= cutoff) {
      rep.C = std::max(rep.C, b.ratio);
      ++rep.calibration_rows;
    }
  }
  if (rep.C <= 0.0) {
    // Nothing counted in the calibration rows; any later count is unexplained.
    rep.worst_slack = 0.0;
    for (const auto& b : rep.rows) {
      if (b.count > 0.0) rep.worst_slack = std::numeric_limits<double>::infinity();
    }
  } else {
    for (const auto& b : rep.rows) rep.worst_slack = std::max(rep.worst_slack, b.ratio / rep.C);
  }
  rep.holds = rep.worst_slack <= tolerance;
  return rep;
}

PlateauSandwich plateau_sandwich(const MongeChart& chart, const Box& K, double ramp, std::int64_t Q, double delta,
                                 int threads) {
  CountQuery query;
  query.Q = Q;
  query.delta = delta;
  query.keep_per_q = false;
  query.threads = threads;
  PlateauSandwich s;
  query.mode = CountMode::kWeighted;
  query.weight = std::make_shared<PlateauWeight>(K.inset(ramp), ramp);
  s.lower = count_near(chart, query).total;
  query.weight = std::make_shared<PlateauWeight>(K, ramp);
  s.upper = count_near(chart, query).total;
  query.mode = CountMode::kIndicator;
  query.weight.reset();
  query.region = ConvexRegion(Box(K.lo(), K.hi(), true));
  s.indicator = count_near(chart, query).total;
  const double slack = 1e-9 * std::max(1.0, s.indicator);
  s.ordered = s.lower <= s.indicator + slack && s.indicator <= s.upper + slack;
  return s;
}

// ------------------------------------------------------ dimension growth

PropertyPManifold parabola_manifold() {
  PropertyPManifold m;
  m.name = "parabola";
  m.domain = Box({0.0}, {1.0}, true);
  m.components.emplace_back(RationalPolynomial(1, {{{2}, {1, 1}}}), 1);
  return m;
}

PropertyPManifold circle_manifold() {
  PropertyPManifold m;
  m.name = "circle";
  m.domain = Box({-0.95}, {0.95}, false);
  m.components.emplace_back(RationalPolynomial(1, {{{0}, {1, 1}}, {{2}, {-1, 1}}}), 2);
  return m;
}

PropertyPManifold twisted_cubic_manifold() {
  PropertyPManifold m;
  m.name = "twisted_cubic";
  m.domain = Box({0.1}, {0.9}, true);
  m.components.emplace_back(RationalPolynomial(1, {{{2}, {1, 1}}}), 1);
  m.components.emplace_back(RationalPolynomial(1, {{{3}, {1, 1}}}), 1);
  return m;
}

PropertyPManifold quadric_pair_manifold() {
  PropertyPManifold m;
  m.name = "quadric_pair";
  m.domain = Box({0.1, 0.1}, {0.9, 0.9}, true);
  m.components.emplace_back(RationalPolynomial(2, {{{2, 0}, {1, 1}}, {{0, 2}, {1, 1}}}), 1);
  m.components.emplace_back(RationalPolynomial(2, {{{1, 1}, {1, 1}}}), 1);
  return m;
}

MongeChart projected_chart(const PropertyPManifold& manifold, const ProjectionWitness& witness) {
  if (witness.s.size() != manifold.codim()) throw InvalidQuery("projection: direction has the wrong length");
  if (witness.r < 1) throw InvalidQuery("projection: r must be positive");
  const std::string name = manifold.name + "_projected";
  if (manifold.codim() == 1 && manifold.components[0].root() != 1) {
    if (witness.s[0] != 1 || witness.r != 1) {
      throw UnsupportedError("projection: a radical component only supports u = 1");
    }
    return polynomial_chart(name, manifold.dim() + 1, manifold.components[0].radicand(),
                            manifold.components[0].root(), manifold.domain);
  }
  RationalPolynomial g;
  bool first = true;
  for (std::size_t i = 0; i < manifold.codim(); ++i) {
    const ExactForm& c = manifold.components[i];
    if (c.root() != 1) throw UnsupportedError("projection: components must be polynomials when codim > 1");
    if (witness.s[i] == 0) continue;
    RationalPolynomial term = c.radicand().scaled(Rational64{witness.s[i], witness.r});
    g = first ? term : g + term;
    first = false;
  }
  if (first) throw InvalidQuery("projection: zero direction");
  return polynomial_chart(name, manifold.dim() + 1, std::move(g), 1, manifold.domain);
}

ProjectionWitness find_witness(const PropertyPManifold& manifold, std::int64_t max_r) {
  if (manifold.codim() == 0) throw InvalidQuery("witness: manifold has no codimension");
  const std::size_t k = manifold.codim();
  const std::size_t per_axis = manifold.dim() == 1 ? 101 : 21;
  constexpr double kFloor = 1e-8;

  auto try_direction = [&](const std::vector<std::int64_t>& s, std::int64_t r) -> std::optional<ProjectionWitness> {
    ProjectionWitness w{s, r, 0.0};
    MongeChart chart = projected_chart(manifold, w);
    const CurvatureReport rep = curvature_window(chart, GridSpec{per_axis, std::nullopt});
    w.min_abs_det = rep.c1;
    if (rep.c1 > kFloor) return w;
    return std::nullopt;
  };

  if (manifold.witness_s) {
    if (auto w = try_direction(*manifold.witness_s, manifold.witness_r)) return *w;
    throw CurvatureError("witness: the given direction has a degenerate projected Hessian on '" + manifold.name + "'");
  }
  const bool radical = k == 1 && manifold.components[0].root() != 1;
  if (radical) {
    if (auto w = try_direction({1}, 1)) return *w;
    throw CurvatureError("witness: no direction with nonvanishing projected Hessian on '" + manifold.name + "'");
  }
  for (std::int64_t r = 1; r <= max_r; ++r) {
    // Candidates s in [-r, r]^k with gcd(s, r) = 1, ordered by L1 norm, then
    // by the number of negative entries, then with larger leading entries
    // first.
    std::vector<std::vector<std::int64_t>> cands;
    std::vector<std::int64_t> s(k, -r);
    for (;;) {
      std::int64_t g = r;
      bool nonzero = false;
      for (auto v : s) {
        g = std::gcd(g, v < 0 ? -v : v);
        nonzero = nonzero || v != 0;
      }
      if (nonzero && g == 1) cands.push_back(s);
      std::size_t axis = k;
      bool done = true;
      while (axis > 0) {
        --axis;
        if (s[axis] < r) {
          ++s[axis];
          done = false;
          break;
        }
        s[axis] = -r;
      }
      if (done) break;
    }
    auto key = [](const std::vector<std::int64_t>& v) {
      std::int64_t l1 = 0;
      std::int64_t neg = 0;
      for (auto x : v) {
        l1 += x < 0 ? -x : x;
        neg += x < 0 ? 1 : 0;
      }
      return std::pair{l1, neg};
    };
    std::stable_sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
      const auto ka = key(a);
      const auto kb = key(b);
      if (ka != kb) return ka < kb;
      return a > b;
    });
    for (const auto& c : cands) {
      if (auto w = try_direction(c, r)) return *w;
    }
  }
  throw CurvatureError("witness: no rational direction with denominator <= " + std::to_string(max_r) +
                       " gives a nonvanishing projected Hessian on '" + manifold.name + "'");
}

std::int64_t count_manifold_points(const PropertyPManifold& manifold, std::int64_t B, int threads) {
  if (B < 1) throw InvalidQuery("manifold count: B must be positive");
  const bool exact = box_exact(manifold.domain);
  std::vector<std::int64_t> per_q(static_cast<std::size_t>(B), 0);
  parallel_for_each_index(descending(1, B), threads, [&](std::int64_t q) {
    std::int64_t c = 0;
    for_each_lattice_point(manifold.domain, q, exact, [&](std::span<const std::int64_t> a, std::span<const double>) {
      for (const ExactForm& f : manifold.components) {
        if (!f.scaled_integer(a, q)) return;
      }
      ++c;
    });
    per_q[static_cast<std::size_t>(q - 1)] = c;
  });
  return std::accumulate(per_q.begin(), per_q.end(), std::int64_t{0});
}

DimensionGrowthReport dimension_growth_count(const PropertyPManifold& manifold, const std::vector<std::int64_t>& Bs,
                                             int threads, double slack) {
  if (Bs.empty()) throw InvalidQuery("dimgrowth: empty B list");
  DimensionGrowthReport rep;
  rep.witness = find_witness(manifold);
  const MongeChart projected = projected_chart(manifold, rep.witness);
  rep.dominated = true;
  std::vector<double> xs, ys;
  for (std::int64_t B : Bs) {
    DimensionGrowthRow row;
    row.B = B;
    row.count = count_manifold_points(manifold, B, threads);
    row.bound_count = count_on(projected, B * rep.witness.r, threads).count;
    rep.dominated = rep.dominated && row.count <= row.bound_count;
    rep.rows.push_back(row);
    xs.push_back(static_cast<double>(B));
    ys.push_back(static_cast<double>(row.count));
  }
  if (Bs.size() >= 2) {
    rep.growth = loglog_fit(xs, ys);
    rep.exponent_ok = rep.growth->fit.slope <= static_cast<double>(manifold.dim()) + slack;
  }
  return rep;
}

std::string dimension_growth_csv(const DimensionGrowthReport& report) {
  std::ostringstream out;
  out << "B,count,bound_count\n";
  for (const auto& r : report.rows) out << r.B << ',' << r.count << ',' << r.bound_count << '\n';
  return out.str();
}

// -------------------------------------------------------- Robert-Sargos

namespace {

void check_rs_args(std::int64_t M, double delta, double alpha) {
  if (M < 2) throw InvalidQuery("rs: M must be at least 2");
  if (M > 100'000) throw BudgetError("rs: M > 100000 overflows the pair table");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidQuery("rs: delta must be a nonnegative number");
  if (alpha == 0.0 || alpha == 1.0 || !std::isfinite(alpha)) throw InvalidQuery("rs: alpha must not be 0 or 1");
}

std::vector<double> rs_powers(std::int64_t M, double alpha) {
  std::vector<double> p(static_cast<std::size_t>(M));
  for (std::int64_t m = M + 1; m <= 2 * M; ++m) p[static_cast<std::size_t>(m - M - 1)] = std::pow(static_cast<double>(m), alpha);
  return p;
}

}  // namespace

std::int64_t robert_sargos_count(std::int64_t M, double delta, double alpha) {
  check_rs_args(M, delta, alpha);
  const auto m = static_cast<std::size_t>(M);
  if (static_cast<double>(m) * static_cast<double>(m) > 4e8) {
    throw BudgetError("rs: the pair table for M = " + std::to_string(M) + " exceeds the memory budget");
  }
  const double band = delta * std::pow(static_cast<double>(M), alpha - 1.0);
  const std::vector<double> p = rs_powers(M, alpha);
  std::vector<double> sums;
  sums.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) sums.push_back(p[i] + p[j]);
  }
  std::sort(sums.begin(), sums.end());
  std::int64_t total = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    while (sums[i] - sums[lo] > band) ++lo;
    if (hi < i) hi = i;
    while (hi + 1 < sums.size() && sums[hi + 1] - sums[i] <= band) ++hi;
    if (__builtin_add_overflow(total, static_cast<std::int64_t>(hi - lo + 1), &total)) {
      throw BudgetError("rs: count overflows 64 bits");
    }
  }
  return total;
}

std::int64_t robert_sargos_bruteforce(std::int64_t M, double delta, double alpha) {
  check_rs_args(M, delta, alpha);
  const auto m = static_cast<std::size_t>(M);
  const double band = delta * std::pow(static_cast<double>(M), alpha - 1.0);
  const std::vector<double> p = rs_powers(M, alpha);
  std::int64_t total = 0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double s = p[a] + p[b];
      for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t d = 0; d < m; ++d) {
          if (std::abs(s - (p[c] + p[d])) <= band) ++total;
        }
      }
    }
  }
  return total;
}

std::string robert_sargos_csv(const std::vector<RobertSargosRow>& rows) {
  std::ostringstream out;
  out << "M,delta,alpha,count\n";
  for (const auto& r : rows) {
    out << r.M << ',' << format_double(r.delta) << ',' << format_double(r.alpha) << ',' << r.count << '\n';
  }
  return out.str();
}

// ------------------------------------------------- metric approximation

ApproxFunction ApproxFunction::power(double nu, double scale) {
  ApproxFunction f;
  f.family = Family::kPower;
  f.nu = nu;
  f.scale = scale;
  return f;
}

ApproxFunction ApproxFunction::log_power(double lambda) {
  ApproxFunction f;
  f.family = Family::kLog;
  f.lambda = lambda;
  return f;
}

double ApproxFunction::operator()(double q) const {
  if (q < static_cast<double>(first_q())) throw InvalidQuery("psi: undefined below q = " + std::to_string(first_q()));
  double v = 0.0;
  switch (family) {
    case Family::kPower:
      v = scale * std::pow(q, -nu);
      break;
    case Family::kLog:
      v = 1.0 / (q * std::pow(std::log(q), lambda));
      break;
    case Family::kCustom:
      if (!custom) throw InvalidQuery("psi: custom family without a function");
      v = custom(q);
      break;
  }
  if (clamp_eta) v = std::max(v, std::pow(q, -1.0 + *clamp_eta));
  return v;
}

std::string ApproxFunction::describe() const {
  std::string base;
  switch (family) {
    case Family::kPower:
      base = format_double(scale) + " q^-" + format_double(nu);
      break;
    case Family::kLog:
      base = "q^-1 (log q)^-" + format_double(lambda);
      break;
    case Family::kCustom:
      base = "custom";
      break;
  }
  if (clamp_eta) base += " clamped at q^{-1+" + format_double(*clamp_eta) + "}";
  return base;
}

namespace {

constexpr double kExponentTie = 1e-12;

// Convergence of sum q^e (log q)^-l for the series terms of a catalog family.
bool power_log_converges(double e, double l) {
  if (e < -1.0 - kExponentTie) return true;
  if (e > -1.0 + kExponentTie) return false;
  return l > 1.0 + kExponentTie;
}

}  // namespace

ConvergenceReport da_convergence_check(const ApproxFunction& psi, double s, int n, std::int64_t max_q) {
  if (n < 2) throw InvalidQuery("da-check: n must be at least 2");
  if (!(s > 0.0)) throw InvalidQuery("da-check: s must be positive");
  if (max_q < 10) throw InvalidQuery("da-check: max_q must be at least 10");
  ConvergenceReport rep;
  rep.below_threshold = s <= (n - 1) / 2.0;
  const double nd = static_cast<double>(n);
  auto term = [&](double q) { return std::pow(psi(q), s + 1.0) * std::pow(q, nd - 1.0 - s); };

  std::optional<bool> symbolic;
  switch (psi.family) {
    case ApproxFunction::Family::kPower:
      symbolic = power_log_converges(-psi.nu * (s + 1.0) + nd - 1.0 - s, 0.0);
      break;
    case ApproxFunction::Family::kLog:
      symbolic = power_log_converges(nd - 2.0 * s - 2.0, psi.lambda * (s + 1.0));
      break;
    case ApproxFunction::Family::kCustom:
      break;
  }
  if (symbolic && psi.clamp_eta) {
    const double e = (-1.0 + *psi.clamp_eta) * (s + 1.0) + nd - 1.0 - s;
    symbolic = *symbolic && power_log_converges(e, 0.0);
  }

  auto local_verdict = [&](double q, double* tail) {
    const double half = std::max<double>(static_cast<double>(psi.first_q()), std::floor(q / 2.0));
    const double t = term(q);
    const double p = std::log(t / term(half)) / std::log(q / half);
    *tail = p < -1.0 ? q * t / (-p - 1.0) : std::numeric_limits<double>::infinity();
    if (p < -1.05) return std::string("converges");
    if (p > -0.95) return std::string("diverges");
    return std::string("inconclusive");
  };

  CompensatedSum<double> sum;
  std::int64_t next_row = 10;
  for (std::int64_t q = psi.first_q(); q <= max_q; ++q) {
    sum.add(term(static_cast<double>(q)));
    if (q == next_row || q == max_q) {
      ConvergenceRow row;
      row.q_max = q;
      row.partial_sum = sum.value();
      double tail = 0.0;
      row.verdict = local_verdict(static_cast<double>(q), &tail);
      rep.tail_estimate = tail;
      rep.rows.push_back(row);
      if (q == next_row) next_row = next_row > max_q / 10 ? max_q : next_row * 10;
    }
  }
  if (symbolic) {
    rep.symbolic = true;
    rep.verdict = *symbolic ? "converges" : "diverges";
  } else {
    rep.verdict = "inconclusive";
  }
  return rep;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "q_max,partial_sum,verdict\n";
  for (const auto& r : report.rows) out << r.q_max << ',' << format_double(r.partial_sum) << ',' << r.verdict << '\n';
  return out.str();
}

DyadicReport da_dyadic_count_check(const MongeChart& chart, const ApproxFunction& psi, int i_lo, int i_hi,
                                   int threads, double budget) {
  const std::size_t n = chart.ambient_dim();
  if (n != 2 && n != 3) throw InvalidQuery("dyadic check: chart must have n = 2 or 3");
  if (i_lo < 0 || i_hi < i_lo || i_hi > 40) throw InvalidQuery("dyadic check: bad i range");
  if (static_cast<double>(std::int64_t{1} << i_lo) < static_cast<double>(psi.first_q())) {
    throw InvalidQuery("dyadic check: psi is undefined at 2^i_lo");
  }
  const Box& box = chart.domain_box();
  const std::int64_t q_top = (std::int64_t{1} << (i_hi + 1)) - 1;
  if (estimated_lattice_points(box, std::int64_t{1} << i_lo, std::min<std::int64_t>(q_top, 1 << 22)) > budget ||
      q_top > (std::int64_t{1} << 22)) {
    throw BudgetError("dyadic check: i_hi = " + std::to_string(i_hi) + " exceeds the enumeration budget");
  }

  DyadicReport rep;
  const std::size_t per_axis = n == 2 ? 201 : 41;
  for (const auto& x : grid_points(chart, GridSpec{per_axis, std::nullopt})) {
    rep.c3 = std::max(rep.c3, chart.gradient(x).norm());
  }
  rep.c4 = 1.0 + rep.c3 * std::sqrt(static_cast<double>(n - 1));

  const bool exact = box_exact(box);
  for (int i = i_lo; i <= i_hi; ++i) {
    const std::int64_t q_lo = std::int64_t{1} << i;
    const std::int64_t q_hi = 2 * q_lo - 1;
    const double p = psi(static_cast<double>(q_lo));
    DyadicRow row;
    row.i = i;
    row.threshold = std::min(0.5, rep.c4 * p);
    if (row.threshold >= 0.5) {
      // Every real number is within 1/2 of an integer.
      std::vector<std::int64_t> per_q(static_cast<std::size_t>(q_hi - q_lo + 1), 0);
      parallel_for_each_index(descending(q_lo, q_hi), threads, [&](std::int64_t q) {
        std::int64_t c = 0;
        for_each_lattice_point(box, q, exact, [&](std::span<const std::int64_t>, std::span<const double> x) {
          if (chart.passes_refinement(x)) ++c;
        });
        per_q[static_cast<std::size_t>(q - q_lo)] = c;
      });
      row.count = std::accumulate(per_q.begin(), per_q.end(), std::int64_t{0});
    } else {
      CountQuery query;
      query.Q = q_hi;
      query.delta = row.threshold;
      query.mode = CountMode::kUnweighted;
      query.strictness = Strictness::kNonstrict;
      query.threads = threads;
      const CountResult r = count_near(chart, query);
      for (const auto& pq : r.per_q) {
        if (pq.q >= q_lo) row.count += pq.count;
      }
    }
    row.ratio = static_cast<double>(row.count) / (p * std::pow(static_cast<double>(q_lo), static_cast<double>(n)));
    rep.rows.push_back(row);
  }

  // Bounded ratio: no sustained growth over the upper half of the range.
  std::vector<double> is, lr;
  const int mid = i_lo + (i_hi - i_lo) / 2;
  for (const auto& r : rep.rows) {
    if (r.i >= mid && r.ratio > 0.0) {
      is.push_back(static_cast<double>(r.i));
      lr.push_back(std::log2(r.ratio));
    }
  }
  if (is.size() >= 2) {
    rep.ratio_slope = linear_fit(is, lr).slope;
    rep.bounded = rep.ratio_slope <= 0.1;
  } else {
    rep.bounded = std::all_of(rep.rows.begin(), rep.rows.end(), [](const DyadicRow& r) { return std::isfinite(r.ratio); });
  }
  return rep;
}

// ---------------------------------------------------------------- misc

GrowthEstimate growth_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidQuery("growth_exponent: size mismatch");
  if (x.size() < 4) throw InvalidQuery("growth_exponent: needs at least 4 points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw InvalidQuery("growth_exponent: x must be positive");
    if (i > 0 && !(x[i] > x[i - 1])) throw InvalidQuery("growth_exponent: x must be strictly increasing");
  }
  const GrowthFit g = loglog_fit(x, y);
  if (g.fit.points < 2) throw InvalidQuery("growth_exponent: fewer than two positive values");
  return {g.fit.slope, g.fit.slope_stderr, g.fit.points, g.filtered};
}

}  // namespace near_misses
