#include <iostream>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "near_misses/bootstrap.hpp"
#include "near_misses/duality.hpp"
#include "near_misses/error.hpp"
#include "near_misses/kernels.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/oscillatory.hpp"
#include "near_misses/surface_io.hpp"

namespace near_misses::cli {

namespace {

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

// ----------------------------------------------------------------- dual

struct DualArgs {
  std::string surface = "paraboloid3";
  std::size_t grid = 10;
  std::string report = "csv";
};

void run_dual(const DualArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  ctx.manifest().surface_hash = surface_fingerprint(a.surface);
  if (a.report == "json") common.json_out = true;
  else if (a.report != "csv") throw InvalidQuery("--report must be csv or json");
  const MongeChart chart = resolve_surface(a.surface);
  const DualityResiduals r = verify_duality(chart, a.grid);
  Payload p;
  std::ostringstream csv;
  csv << "metric,value\n"
      << "points," << r.points << '\n'
      << "legendre," << format_double(r.legendre) << '\n'
      << "involution," << format_double(r.involution) << '\n'
      << "gradient_inverse," << format_double(r.gradient_inverse) << '\n'
      << "reciprocity," << format_double(r.reciprocity) << '\n'
      << "signature," << r.signature << '\n'
      << "signature_constant," << (r.signature_constant ? 1 : 0) << '\n';
  p.csv = csv.str();
  p.doc = json{{"surface", chart.name()},
               {"points", r.points},
               {"legendre", r.legendre},
               {"involution", r.involution},
               {"gradient_inverse", r.gradient_inverse},
               {"reciprocity", r.reciprocity},
               {"signature", r.signature},
               {"signature_constant", r.signature_constant}};
  ctx.emit(p);
}

// --------------------------------------------------------------- oscint

struct OscArgs {
  std::string surface = "parabola";
  std::int64_t j = 1;
  std::string k = "0";
  std::int64_t q = 1;
  double tol = 1e-10;
  std::string center;
  double radius = 0.0;
};

void run_oscint(const OscArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  ctx.manifest().surface_hash = surface_fingerprint(a.surface);
  ctx.manifest().tolerances["quad_tol"] = a.tol;
  const MongeChart chart = resolve_surface(a.surface);
  const WeightPtr w = default_weight(chart, a.center.empty() ? std::vector<double>{} : parse_double_list(a.center), a.radius);
  OscillatoryQuery query;
  query.j = a.j;
  query.k = parse_int_list(a.k);
  query.q = a.q;
  query.quad_tol = a.tol;
  if (query.k.size() != chart.dim()) throw InvalidQuery("--k needs " + std::to_string(chart.dim()) + " entries");
  if (query.j < 1 || query.q < 1) throw InvalidQuery("--j and --q must be positive");

  const DualGeometry geom = dual_geometry(chart, w);
  const KClass cls = classify_k(query.j, query.k, geom);
  Payload p;
  p.doc = json{{"surface", chart.name()}, {"j", query.j}, {"k", query.k}, {"q", query.q}, {"class", to_string(cls)}};
  std::ostringstream csv;
  csv << "quadrature_re,quadrature_im,error,leading_re,leading_im,class,sigma,delta\n";
  if (cls == KClass::kK1) {
    const StationaryPhaseResult sp = stationary_phase_approx(chart, *w, query);
    p.doc["quadrature"] = complex_json(sp.value);
    p.doc["error"] = sp.quad_error;
    p.doc["leading"] = complex_json(sp.leading);
    p.doc["sigma"] = sp.sigma;
    p.doc["delta"] = sp.Delta;
    p.doc["lambda"] = sp.lambda;
    csv << format_double(sp.value.real()) << ',' << format_double(sp.value.imag()) << ','
        << format_double(sp.quad_error) << ',' << format_double(sp.leading.real()) << ','
        << format_double(sp.leading.imag()) << ',' << to_string(cls) << ',' << sp.sigma << ','
        << format_double(sp.Delta) << '\n';
  } else {
    const QuadratureValue v = integral_quadrature(chart, *w, query);
    p.doc["quadrature"] = complex_json(v.value);
    p.doc["error"] = v.error;
    p.doc["leading"] = nullptr;
    p.doc["sigma"] = nullptr;
    p.doc["delta"] = nullptr;
    csv << format_double(v.value.real()) << ',' << format_double(v.value.imag()) << ',' << format_double(v.error)
        << ",,," << to_string(cls) << ",,\n";
  }
  p.csv = csv.str();
  ctx.emit(p);
}

// -------------------------------------------------------- poisson-check

struct PoissonArgs {
  std::string surface = "parabola";
  std::int64_t j = 1;
  std::int64_t q = 1;
  std::int64_t trunc = 0;
  double tail = 1e-8;
  double tol = 1e-13;
  std::string center;
  double radius = 0.0;
};

void run_poisson(const PoissonArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  ctx.manifest().surface_hash = surface_fingerprint(a.surface);
  ctx.manifest().tolerances["quad_tol"] = a.tol;
  ctx.manifest().tolerances["tail_target"] = a.tail;
  const MongeChart chart = resolve_surface(a.surface);
  const WeightPtr w = default_weight(chart, a.center.empty() ? std::vector<double>{} : parse_double_list(a.center), a.radius);
  const std::optional<std::int64_t> trunc = a.trunc > 0 ? std::optional(a.trunc) : std::nullopt;
  const PoissonCheck c = poisson_check(chart, *w, a.j, a.q, trunc, a.tail, a.tol);
  Payload p;
  std::ostringstream csv;
  csv << "lattice_re,lattice_im,dual_re,dual_im,residual,quad_error,tail_estimate,truncation,terms\n"
      << format_double(c.lattice_sum.real()) << ',' << format_double(c.lattice_sum.imag()) << ','
      << format_double(c.dual_sum.real()) << ',' << format_double(c.dual_sum.imag()) << ','
      << format_double(c.residual) << ',' << format_double(c.quad_error) << ',' << format_double(c.tail_estimate)
      << ',' << c.truncation << ',' << c.terms << '\n';
  p.csv = csv.str();
  p.doc = json{{"surface", chart.name()},
               {"j", a.j},
               {"q", a.q},
               {"lattice_sum", complex_json(c.lattice_sum)},
               {"dual_sum", complex_json(c.dual_sum)},
               {"residual", c.residual},
               {"quad_error", c.quad_error},
               {"tail_estimate", c.tail_estimate},
               {"truncation", c.truncation},
               {"terms", c.terms},
               {"k_lo", c.k_lo},
               {"k_hi", c.k_hi}};
  ctx.emit(p);
}

// -------------------------------------------------------------- kernels

struct KernelArgs {
  std::int64_t J = 9;
  double alpha = -0.1;
  double beta = 0.1;
  std::size_t grid = 10'000;
};

void run_kernels(const KernelArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  ctx.manifest().tolerances["sandwich_tol"] = 1e-12;
  const SelbergPair pair(a.J, a.alpha, a.beta);
  const SandwichReport rep = validate_selberg(pair, a.grid);
  Payload p;
  std::ostringstream csv;
  csv << "j,s_plus,s_minus,s_plus_im,s_minus_im\n";
  json coeffs = json::array();
  for (std::int64_t h = -a.J; h <= a.J; ++h) {
    const Complex sp = pair.coeff_plus(h);
    const Complex sm = pair.coeff_minus(h);
    csv << h << ',' << format_double(sp.real()) << ',' << format_double(sm.real()) << ',' << format_double(sp.imag())
        << ',' << format_double(sm.imag()) << '\n';
    coeffs.push_back(json{{"j", h}, {"s_plus", complex_json(sp)}, {"s_minus", complex_json(sm)}});
  }
  p.csv = csv.str();
  json report{{"grid_points", rep.grid_points},           {"violations", rep.violations},
              {"worst_excess", rep.worst_excess},         {"worst_x", rep.worst_x},
              {"zero_coeff_error", rep.zero_coeff_error}, {"worst_coeff_slack", rep.worst_coeff_slack},
              {"ok", rep.ok}};
  p.doc = json{{"J", a.J}, {"alpha", a.alpha}, {"beta", a.beta}, {"coefficients", coeffs}, {"sandwich", report}};
  ctx.emit(p);
  if (!common.json_out) {
    std::cerr << "sandwich: " << rep.violations << " violations on " << rep.grid_points << " points, worst excess "
              << format_double(rep.worst_excess) << ", zero-coefficient error " << format_double(rep.zero_coeff_error)
              << "\n";
  }
  if (!rep.ok) throw ContractViolation("Selberg sandwich violated");
}

// ------------------------------------------------------------ bootstrap

struct BootstrapArgs {
  int n = 3;
  std::int64_t imax = 10;
  double Q = 0.0;
};

void run_bootstrap(const BootstrapArgs& a, Common& common, const std::vector<std::string>& argv) {
  Context ctx(argv, common);
  const ExponentSequence seq = exponent_sequence(a.n, a.imax);
  const std::int64_t sched = a.Q > 0.0 ? iteration_schedule(a.n, a.Q) : -1;
  const std::string sched_text = sched >= 0 ? std::to_string(sched) : std::string();
  Payload p;
  std::ostringstream csv;
  csv << "i,beta,beta_decimal,schedule\n";
  json rows = json::array();
  for (std::size_t i = 1; i <= seq.betas.size(); ++i) {
    const Rational& b = seq.beta(i);
    const std::string frac = b.get_str();
    csv << i << ',' << frac << ',' << format_double(b.get_d()) << ',' << sched_text << '\n';
    rows.push_back(json{{"i", i}, {"beta", frac}, {"beta_decimal", b.get_d()}});
  }
  p.csv = csv.str();
  p.doc = json{{"n", a.n}, {"imax", a.imax}, {"betas", rows}};
  p.doc["schedule"] = sched >= 0 ? json(sched) : json(nullptr);
  ctx.emit(p);
}

}  // namespace

void register_analysis(CLI::App& app, Common& common, std::vector<std::string>& argv) {
  {
    auto a = std::make_shared<DualArgs>();
    CLI::App* sub = app.add_subcommand("dual", "Legendre dual residuals on a grid");
    sub->add_option("--surface", a->surface, "builtin name or JSON file");
    sub->add_option("--grid", a->grid, "grid points per axis");
    sub->add_option("--report", a->report, "csv | json");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_dual(*a, common, argv); });
  }
  {
    auto a = std::make_shared<OscArgs>();
    CLI::App* sub = app.add_subcommand("oscint", "oscillatory integral I(j,k;q) and its stationary-phase term");
    sub->add_option("--surface", a->surface, "builtin name or JSON file");
    sub->add_option("--j", a->j, "j >= 1");
    sub->add_option("--k", a->k, "integer frequency, comma separated");
    sub->add_option("--q", a->q, "q >= 1");
    sub->add_option("--tol", a->tol, "quadrature tolerance");
    sub->add_option("--center", a->center, "bump centre, comma separated");
    sub->add_option("--radius", a->radius, "bump radius");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_oscint(*a, common, argv); });
  }
  {
    auto a = std::make_shared<PoissonArgs>();
    CLI::App* sub = app.add_subcommand("poisson-check", "both sides of the Poisson identity for one (j, q)");
    sub->add_option("--surface", a->surface, "builtin name or JSON file");
    sub->add_option("--j", a->j, "j >= 1");
    sub->add_option("--q", a->q, "q >= 1");
    sub->add_option("--trunc", a->trunc, "fixed k-box half width (default: adaptive)");
    sub->add_option("--tail", a->tail, "target for the estimated truncation tail");
    sub->add_option("--tol", a->tol, "quadrature tolerance");
    sub->add_option("--center", a->center, "bump centre, comma separated");
    sub->add_option("--radius", a->radius, "bump radius");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_poisson(*a, common, argv); });
  }
  {
    auto a = std::make_shared<KernelArgs>();
    CLI::App* sub = app.add_subcommand("kernels", "Selberg majorant/minorant coefficients and sandwich check");
    sub->add_option("--J", a->J, "degree")->required();
    sub->add_option("--alpha", a->alpha, "left endpoint");
    sub->add_option("--beta", a->beta, "right endpoint");
    sub->add_option("--grid", a->grid, "validation grid size");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_kernels(*a, common, argv); });
  }
  {
    auto a = std::make_shared<BootstrapArgs>();
    CLI::App* sub = app.add_subcommand("bootstrap", "exact exponent recursion");
    sub->add_option("--n", a->n, "ambient dimension")->required();
    sub->add_option("--imax", a->imax, "number of terms");
    sub->add_option("--Q", a->Q, "height for the iteration schedule");
    add_common(*sub, common);
    sub->callback([a, &common, &argv] { run_bootstrap(*a, common, argv); });
  }
}

}  // namespace near_misses::cli
