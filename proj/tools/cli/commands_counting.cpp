#include <fstream>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "near_misses/counting.hpp"
#include "near_misses/error.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/surface_io.hpp"

namespace near_misses::cli {

namespace {

struct CountArgs {
  std::string surface = "paraboloid3";
  std::int64_t Q = 100;
  double delta = 0.1;
  std::string mode = "weighted";
  bool coprime = false;
  bool strict = false;
  bool nonstrict = false;
  double tie_eps = 0.0;
  std::string per_q_out;
  std::string center;
  double radius = 0.0;
  std::string k_lo;
  std::string k_hi;
};

CountMode parse_mode(const std::string& m) {
  if (m == "weighted") return CountMode::kWeighted;
  if (m == "indicator") return CountMode::kIndicator;
  if (m == "unweighted") return CountMode::kUnweighted;
  throw InvalidQuery("--mode must be weighted, indicator or unweighted");
}

void run_count(const CountArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  ctx.manifest().surface_hash = surface_fingerprint(a.surface);
  const MongeChart chart = resolve_surface(a.surface);
  if (a.strict && a.nonstrict) throw InvalidQuery("--strict and --nonstrict are exclusive");

  CountQuery query;
  query.Q = a.Q;
  query.delta = a.delta;
  query.mode = parse_mode(a.mode);
  query.coprime = a.coprime;
  query.strictness = a.nonstrict ? Strictness::kNonstrict : Strictness::kStrict;
  query.tie_epsilon = a.tie_eps;
  query.threads = ctx.threads();
  query.keep_per_q = true;
  if (query.mode == CountMode::kWeighted) {
    query.weight = default_weight(chart, a.center.empty() ? std::vector<double>{} : parse_double_list(a.center), a.radius);
  }
  if (query.mode == CountMode::kIndicator) {
    const Box& d = chart.domain_box();
    const double inset = 0.1 * d.min_width();
    std::vector<double> lo = a.k_lo.empty() ? d.inset(inset).lo() : parse_double_list(a.k_lo);
    std::vector<double> hi = a.k_hi.empty() ? d.inset(inset).hi() : parse_double_list(a.k_hi);
    query.region = ConvexRegion(Box(std::move(lo), std::move(hi), true));
  }
  ctx.manifest().tolerances["tie_epsilon"] = a.tie_eps;

  CountResult result;
  std::optional<CoprimeResult> cop;
  if (a.coprime) {
    cop = count_coprime(chart, query);
    result = cop->direct;
  } else {
    result = count_near(chart, query);
  }
  std::optional<double> main;
  if (query.mode != CountMode::kUnweighted && query.delta > 0.0) main = main_term(query, chart);

  if (!a.per_q_out.empty()) {
    std::ofstream out(a.per_q_out, std::ios::binary);
    if (!out) throw InvalidQuery("cannot write " + a.per_q_out);
    out << "q,subtotal,ambiguous\n";
    for (const auto& p : result.per_q) out << p.q << ',' << format_double(p.subtotal) << ',' << p.ambiguous << '\n';
  }

  Payload p;
  std::ostringstream csv;
  csv << "surface,Q,delta,mode,total,count,ambiguous,candidates,main_term\n";
  csv << chart.name() << ',' << a.Q << ',' << format_double(a.delta) << ',' << a.mode << ','
      << format_double(result.total) << ',' << result.count << ',' << result.ambiguous << ','
      << result.candidates_scanned << ',' << (main ? format_double(*main) : "") << '\n';
  p.csv = csv.str();
  p.doc = json{{"surface", chart.name()},
               {"Q", a.Q},
               {"delta", a.delta},
               {"mode", a.mode},
               {"strict", query.strictness == Strictness::kStrict},
               {"total", result.total},
               {"count", result.count},
               {"ambiguous", result.ambiguous},
               {"candidates", result.candidates_scanned}};
  p.doc["main_term"] = main ? json(*main) : json(nullptr);
  if (cop) {
    p.doc["coprime"] = json{{"direct", cop->direct.total},
                            {"mobius", cop->mobius_total},
                            {"discrepancy", cop->discrepancy},
                            {"cross_checked", cop->cross_checked}};
  }
  ctx.emit(p);
}

}  // namespace

void register_counting(CLI::App& app, Common& common, std::vector<std::string>& argv) {
  auto a = std::make_shared<CountArgs>();
  CLI::App* sub = app.add_subcommand("count", "count rational points within delta/q of a surface");
  sub->add_option("--surface", a->surface, "builtin name or JSON file");
  sub->add_option("--Q", a->Q, "height bound")->required();
  sub->add_option("--delta", a->delta, "distance threshold in [0, 1/2)")->required();
  sub->add_option("--mode", a->mode, "weighted | indicator | unweighted");
  sub->add_flag("--coprime", a->coprime, "primitive points only, cross-checked by Moebius inversion");
  sub->add_flag("--strict", a->strict, "||q f(a/q)|| < delta (default)");
  sub->add_flag("--nonstrict", a->nonstrict, "||q f(a/q)|| <= delta");
  sub->add_option("--tie-eps", a->tie_eps, "tie tolerance around delta");
  sub->add_option("--per-q-out", a->per_q_out, "CSV of per-denominator subtotals");
  sub->add_option("--center", a->center, "bump centre, comma separated");
  sub->add_option("--radius", a->radius, "bump radius");
  sub->add_option("--K-lo", a->k_lo, "indicator box lower corner");
  sub->add_option("--K-hi", a->k_hi, "indicator box upper corner");
  add_common(*sub, common);
  sub->callback([a, &common, &argv] { run_count(*a, common, argv); });
}

}  // namespace near_misses::cli
