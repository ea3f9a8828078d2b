#include <iostream>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "near_misses/error.hpp"
#include "near_misses/experiments.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/surface_io.hpp"

namespace near_misses::cli {

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string surface = "paraboloid3";
  std::string mode = "weighted";
  std::string qs = "100,200,400,800";
  std::string delta = "power:0.5";
  int reps = 1;
  bool floor = false;
  bool fit = false;
  std::string center;
  double radius = 0.0;
  std::string k_lo;
  std::string k_hi;
};

void run_sweep(const SweepArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  ctx.manifest().surface_hash = surface_fingerprint(a.surface);
  SweepSpec spec;
  spec.chart = std::make_shared<const MongeChart>(resolve_surface(a.surface));
  const MongeChart& chart = *spec.chart;
  if (a.mode == "weighted") {
    spec.mode = CountMode::kWeighted;
    spec.weight = default_weight(chart, a.center.empty() ? std::vector<double>{} : parse_double_list(a.center), a.radius);
  } else if (a.mode == "indicator") {
    spec.mode = CountMode::kIndicator;
    const Box& d = chart.domain_box();
    const double inset = 0.1 * d.min_width();
    std::vector<double> lo = a.k_lo.empty() ? d.inset(inset).lo() : parse_double_list(a.k_lo);
    std::vector<double> hi = a.k_hi.empty() ? d.inset(inset).hi() : parse_double_list(a.k_hi);
    spec.region = ConvexRegion(Box(std::move(lo), std::move(hi), true));
  } else if (a.mode == "unweighted") {
    spec.mode = CountMode::kUnweighted;
  } else {
    throw InvalidQuery("--mode must be weighted, indicator or unweighted");
  }
  spec.Q_list = parse_int_list(a.qs);
  spec.delta_rule = parse_delta_rule(a.delta);
  spec.repetitions = a.reps;
  spec.seed = common.seed;
  spec.require_floor = a.floor;
  spec.threads = ctx.threads();
  const SweepTable table = asymptotic_sweep(spec);

  Payload p;
  p.csv = sweep_csv(table);
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back(json{{"Q", r.Q},
                        {"delta", r.delta},
                        {"count", r.count},
                        {"main_term", optional_json(r.main_term)},
                        {"ratio", optional_json(r.ratio)},
                        {"residual", optional_json(r.residual)}});
  }
  p.doc = json{{"surface", chart.name()}, {"mode", a.mode}, {"delta_rule", spec.delta_rule.describe()}, {"rows", rows}};
  if (table.residual_fit) {
    p.doc["residual_fit"] = json{{"slope", table.residual_fit->fit.slope},
                                 {"stderr", table.residual_fit->fit.slope_stderr},
                                 {"points", table.residual_fit->fit.points}};
  }
  if (a.fit) {
    const BoundShapeReport b = bound_shape_check(chart.ambient_dim(), table.rows);
    p.doc["bound_shape"] = json{{"model", b.model.describe()},
                                {"C", b.C},
                                {"worst_slack", b.worst_slack},
                                {"holds", b.holds}};
    if (!common.json_out) {
      std::cerr << "bound shape: E = " << b.model.describe() << ", C = " << format_double(b.C)
                << ", worst slack = " << format_double(b.worst_slack) << (b.holds ? " (holds)" : " (violated)") << "\n";
    }
  }
  ctx.emit(p);
}

// ------------------------------------------------------------------- rs

struct RsArgs {
  std::string ms = "50,100,200";
  double delta = 0.1;
  double alpha = 1.5;
  bool brute = false;
};

void run_rs(const RsArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  std::vector<RobertSargosRow> rows;
  json doc_rows = json::array();
  for (std::int64_t M : parse_int_list(a.ms)) {
    RobertSargosRow r{M, a.delta, a.alpha, robert_sargos_count(M, a.delta, a.alpha)};
    json row{{"M", M}, {"delta", a.delta}, {"alpha", a.alpha}, {"count", r.count}};
    if (a.brute) {
      const std::int64_t b = robert_sargos_bruteforce(M, a.delta, a.alpha);
      row["bruteforce"] = b;
      if (b != r.count) {
        throw ContractViolation("rs: two-pointer count " + std::to_string(r.count) + " differs from brute force " +
                                std::to_string(b) + " at M = " + std::to_string(M));
      }
    }
    rows.push_back(r);
    doc_rows.push_back(row);
  }
  Payload p;
  p.csv = robert_sargos_csv(rows);
  p.doc = json{{"rows", doc_rows}};
  ctx.emit(p);
}

// ------------------------------------------------------------ dimgrowth

struct DimArgs {
  std::string manifold = "parabola";
  std::string bs = "125,250,500,1000,2000";
  std::string witness;
  std::int64_t r = 1;
};

PropertyPManifold manifold_by_name(const std::string& name) {
  if (name == "parabola") return parabola_manifold();
  if (name == "circle") return circle_manifold();
  if (name == "twisted_cubic") return twisted_cubic_manifold();
  if (name == "quadric_pair") return quadric_pair_manifold();
  throw InvalidQuery("unknown manifold '" + name + "' (parabola, circle, twisted_cubic, quadric_pair)");
}

void run_dimgrowth(const DimArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  PropertyPManifold m = manifold_by_name(a.manifold);
  if (!a.witness.empty()) {
    m.witness_s = parse_int_list(a.witness);
    m.witness_r = a.r;
  }
  const DimensionGrowthReport rep = dimension_growth_count(m, parse_int_list(a.bs), ctx.threads());
  Payload p;
  p.csv = dimension_growth_csv(rep);
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back(json{{"B", r.B}, {"count", r.count}, {"bound_count", r.bound_count}});
  p.doc = json{{"manifold", m.name},
               {"dim", m.dim()},
               {"witness", json{{"s", rep.witness.s}, {"r", rep.witness.r}, {"min_abs_det", rep.witness.min_abs_det}}},
               {"rows", rows},
               {"dominated", rep.dominated}};
  if (rep.growth) {
    p.doc["growth"] = json{{"slope", rep.growth->fit.slope}, {"stderr", rep.growth->fit.slope_stderr}};
    p.doc["exponent_ok"] = rep.exponent_ok;
  }
  ctx.emit(p);
  if (!rep.dominated) throw ContractViolation("dimgrowth: N_X(B) exceeded N_S(Br, 0)");
}

// ------------------------------------------------------------- da-check

struct DaArgs {
  std::string psi = "power:1";
  double s = 1.5;
  int n = 3;
  std::int64_t qmax = 1'000'000;
  double eta = -1.0;
  std::string surface;
  int ilo = 0;
  int ihi = 10;
};

ApproxFunction parse_psi(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidQuery("--psi must look like power:NU, log:LAMBDA or const:C");
  const std::string kind = text.substr(0, colon);
  const std::vector<double> v = parse_double_list(text.substr(colon + 1));
  if (v.size() != 1) throw InvalidQuery("--psi takes a single parameter");
  if (kind == "power") return ApproxFunction::power(v[0]);
  if (kind == "log") return ApproxFunction::log_power(v[0]);
  if (kind == "const") {
    if (!(v[0] > 0.0)) throw InvalidQuery("--psi const needs a positive value");
    return ApproxFunction::constant(v[0]);
  }
  throw InvalidQuery("--psi kind must be power, log or const");
}

void run_da(const DaArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  ApproxFunction psi = parse_psi(a.psi);
  if (a.eta > 0.0) psi.clamp_eta = a.eta;
  Payload p;
  if (!a.surface.empty()) {
    ctx.manifest().surface_hash = surface_fingerprint(a.surface);
    const MongeChart chart = resolve_surface(a.surface);
    const DyadicReport rep = da_dyadic_count_check(chart, psi, a.ilo, a.ihi, ctx.threads());
    std::ostringstream csv;
    csv << "i,threshold,count,ratio\n";
    json rows = json::array();
    for (const auto& r : rep.rows) {
      csv << r.i << ',' << format_double(r.threshold) << ',' << r.count << ',' << format_double(r.ratio) << '\n';
      rows.push_back(json{{"i", r.i}, {"threshold", r.threshold}, {"count", r.count}, {"ratio", r.ratio}});
    }
    p.csv = csv.str();
    p.doc = json{{"surface", chart.name()}, {"psi", psi.describe()},       {"c3", rep.c3},
                 {"c4", rep.c4},            {"ratio_slope", rep.ratio_slope}, {"bounded", rep.bounded},
                 {"rows", rows}};
    ctx.emit(p);
    return;
  }
  const ConvergenceReport rep = da_convergence_check(psi, a.s, a.n, a.qmax);
  if (rep.below_threshold) std::cerr << "warning: s <= (n-1)/2 lies outside the metric regime\n";
  p.csv = convergence_csv(rep);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back(json{{"q_max", r.q_max}, {"partial_sum", r.partial_sum}, {"verdict", r.verdict}});
  }
  p.doc = json{{"psi", psi.describe()},
               {"s", a.s},
               {"n", a.n},
               {"verdict", rep.verdict},
               {"symbolic", rep.symbolic},
               {"tail_estimate", std::isfinite(rep.tail_estimate) ? json(rep.tail_estimate) : json(nullptr)},
               {"rows", rows}};
  ctx.emit(p);
}

}  // namespace

void register_experiments(CLI::App& app, Common& common, std::vector<std::string>& argv) {
  {
    auto a = std::make_shared<SweepArgs>();
    CLI::App* sub = app.add_subcommand("sweep", "counts against the main term over a list of heights");
    sub->add_option("--surface", a->surface, "builtin name or JSON file");
    sub->add_option("--mode", a->mode, "weighted | indicator | unweighted");
    sub->add_option("--Q", a->qs, "increasing heights, comma separated");
    sub->add_option("--delta", a->delta, "fixed:D | power:GAMMA | floor:EPS");
    sub->add_option("--reps", a->reps, "jittered weight placements per row");
    sub->add_flag("--floor", a->floor, "require delta > Q^{-1+eps} on every row");
    sub->add_flag("--fit", a->fit, "fit and check the error-term envelope");
    sub->add_option("--center", a->center, "bump centre, comma separated");
    sub->add_option("--radius", a->radius, "bump radius");
    sub->add_option("--K-lo", a->k_lo, "indicator box lower corner");
    sub->add_option("--K-hi", a->k_hi, "indicator box upper corner");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_sweep(*a, common, argv); });
  }
  {
    auto a = std::make_shared<RsArgs>();
    CLI::App* sub = app.add_subcommand("rs", "quadruples with |m1^a + m2^a - m3^a - m4^a| <= delta M^{a-1}");
    sub->add_option("--M", a->ms, "block sizes, comma separated");
    sub->add_option("--delta", a->delta, "band width");
    sub->add_option("--alpha", a->alpha, "exponent, not 0 or 1");
    sub->add_flag("--bruteforce", a->brute, "cross-check against the quartic enumeration");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_rs(*a, common, argv); });
  }
  {
    auto a = std::make_shared<DimArgs>();
    CLI::App* sub = app.add_subcommand("dimgrowth", "rational points on a curved submanifold and its projection");
    sub->add_option("--manifold", a->manifold, "parabola | circle | twisted_cubic | quadric_pair");
    sub->add_option("--B", a->bs, "heights, comma separated");
    sub->add_option("--witness", a->witness, "projection numerators s, comma separated");
    sub->add_option("--r", a->r, "projection denominator");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_dimgrowth(*a, common, argv); });
  }
  {
    auto a = std::make_shared<DaArgs>();
    CLI::App* sub = app.add_subcommand("da-check", "convergence sum and dyadic counts for an approximation function");
    sub->add_option("--psi", a->psi, "power:NU | log:LAMBDA | const:C");
    sub->add_option("--s", a->s, "dimension parameter s");
    sub->add_option("--n", a->n, "ambient dimension");
    sub->add_option("--qmax", a->qmax, "last partial sum");
    sub->add_option("--eta", a->eta, "clamp psi(q) >= q^{-1+eta}");
    sub->add_option("--surface", a->surface, "run the dyadic count check on this chart instead");
    sub->add_option("--ilo", a->ilo, "first dyadic block");
    sub->add_option("--ihi", a->ihi, "last dyadic block");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_da(*a, common, argv); });
  }
}

}  // namespace near_misses::cli
