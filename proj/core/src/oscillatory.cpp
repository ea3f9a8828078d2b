#include "near_misses/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "near_misses/error.hpp"
#include "near_misses/stats.hpp"
#include "tensor_rule.hpp"

namespace near_misses {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_query(const MongeChart& chart, const Weight& w, const OscillatoryQuery& q) {
  if (q.j < 1) throw InvalidQuery("oscillatory: j must be positive");
  if (q.q < 1) throw InvalidQuery("oscillatory: q must be positive");
  if (q.k.size() != chart.dim()) throw InvalidQuery("oscillatory: k has the wrong dimension");
  if (w.dim() != chart.dim()) throw InvalidQuery("oscillatory: weight dimension mismatch");
  if (!(q.quad_tol > 0.0 && q.quad_tol <= 1e-3)) throw InvalidQuery("oscillatory: quad_tol must lie in (0, 1e-3]");
  if (!chart.domain_box().strictly_contains(w.support_box())) {
    throw InvalidQuery("oscillatory: weight support must lie strictly inside the domain");
  }
}

Complex tensor_integral(const MongeChart& chart, const Weight& w, const OscillatoryQuery& q,
                        const std::vector<detail::AxisRule>& rules) {
  const std::size_t d = rules.size();
  const double qj = static_cast<double>(q.q) * static_cast<double>(q.j);
  const double qd = static_cast<double>(q.q);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  CompensatedSum<Complex> total;
  const auto& inner = rules[d - 1];
  for (;;) {
    double outer_weight = 1.0;
    double outer_linear = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      x[i] = rules[i].nodes[idx[i]];
      outer_weight *= rules[i].weights[idx[i]];
      outer_linear += static_cast<double>(q.k[i]) * x[i];
    }
    Complex row{};
    for (std::size_t m = 0; m < inner.nodes.size(); ++m) {
      x[d - 1] = inner.nodes[m];
      const double wx = w(x);
      if (wx == 0.0) continue;
      const double phase = qj * chart.value(x) - qd * (outer_linear + static_cast<double>(q.k[d - 1]) * x[d - 1]);
      row += (wx * inner.weights[m]) * unit_phase(phase);
    }
    total.add(outer_weight * row);
    if (d == 1) break;
    std::size_t k = 0;
    while (k + 1 < d && ++idx[k] == rules[k].nodes.size()) idx[k++] = 0;
    if (k + 1 == d) break;
  }
  return total.value();
}

std::vector<detail::AxisRule> rules_for(const std::vector<std::vector<double>>& edges, const GaussLegendreRule& gl) {
  std::vector<detail::AxisRule> r;
  for (const auto& e : edges) r.push_back(detail::composite_rule(e, gl));
  return r;
}

std::size_t grid_size(const std::vector<std::vector<double>>& edges, std::size_t order) {
  double n = 1.0;
  for (const auto& e : edges) n *= static_cast<double>((e.size() - 1) * order);
  return n > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(n);
}

}  // namespace

QuadratureValue integral_quadrature(const MongeChart& chart, const Weight& w, const OscillatoryQuery& query) {
  check_query(chart, w, query);
  const Box& box = w.support_box();
  const std::size_t d = box.dim();
  detail::PhaseSpec phase{query.q, query.j, query.k, query.k};
  const auto rate = detail::phase_rate_profile(chart, box, phase, detail::bins_for_dim(d));
  std::vector<std::vector<double>> edges;
  for (std::size_t i = 0; i < d; ++i) {
    edges.push_back(detail::panel_edges(box.lo()[i], box.hi()[i], rate[i], detail::kCyclesPerPanel,
                                        detail::kMinPanels));
  }
  const auto low_rule = gauss_legendre(detail::kLowOrder);
  const auto high_rule = gauss_legendre(detail::kHighOrder);
  QuadratureValue out;
  bool have_estimate = false;
  for (int level = 0; level < 12; ++level) {
    const std::size_t cost = grid_size(edges, detail::kLowOrder) + grid_size(edges, detail::kHighOrder);
    if (cost > query.max_evaluations || out.evaluations + cost > query.max_evaluations) {
      std::string msg = "integral_quadrature: evaluation budget exhausted";
      if (have_estimate) {
        msg += "; best estimate " + format_double(out.value.real()) + " + " + format_double(out.value.imag()) +
               "i, error " + format_double(out.error);
      }
      throw BudgetError(msg);
    }
    const Complex lo = tensor_integral(chart, w, query, rules_for(edges, low_rule));
    const Complex hi = tensor_integral(chart, w, query, rules_for(edges, high_rule));
    out.evaluations += cost;
    out.value = hi;
    out.error = std::abs(hi - lo);
    have_estimate = true;
    out.panels_per_axis.clear();
    for (const auto& e : edges) out.panels_per_axis.push_back(e.size() - 1);
    if (out.error <= query.quad_tol) return out;
    for (auto& e : edges) e = detail::bisect(e);
  }
  throw BudgetError("integral_quadrature: refinement did not converge; best estimate " +
                    format_double(out.value.real()) + " + " + format_double(out.value.imag()) + "i");
}

std::string to_string(KClass c) {
  switch (c) {
    case KClass::kK1:
      return "K1";
    case KClass::kK2:
      return "K2";
    case KClass::kK3:
      return "K3";
  }
  return "?";
}

KClass classify_k(std::int64_t j, const std::vector<std::int64_t>& k, const DualGeometry& geometry) {
  if (j < 1) throw InvalidQuery("classify_k: j must be positive");
  if (k.size() != geometry.chart->dim()) throw InvalidQuery("classify_k: k has the wrong dimension");
  std::vector<double> y(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) y[i] = static_cast<double>(k[i]) / static_cast<double>(j);
  const double dist = geometry.distance_to_v(y);
  if (dist == 0.0) return KClass::kK1;
  return dist >= geometry.rho ? KClass::kK2 : KClass::kK3;
}

KClassCensus classify_census(std::int64_t j, const DualGeometry& geometry) {
  if (j < 1) throw InvalidQuery("classify_census: j must be positive");
  const std::size_t d = geometry.chart->dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& b : geometry.v_boundary) {
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], b(static_cast<Eigen::Index>(i)));
      hi[i] = std::max(hi[i], b(static_cast<Eigen::Index>(i)));
    }
  }
  const double jd = static_cast<double>(j);
  std::vector<std::int64_t> klo(d), khi(d), k(d);
  for (std::size_t i = 0; i < d; ++i) {
    klo[i] = static_cast<std::int64_t>(std::floor(jd * (lo[i] - geometry.rho))) - 1;
    khi[i] = static_cast<std::int64_t>(std::ceil(jd * (hi[i] + geometry.rho))) + 1;
    k[i] = klo[i];
  }
  KClassCensus c;
  c.j = j;
  for (;;) {
    switch (classify_k(j, k, geometry)) {
      case KClass::kK1:
        ++c.k1;
        break;
      case KClass::kK3:
        ++c.k3;
        break;
      case KClass::kK2:
        break;
    }
    std::size_t i = 0;
    while (i < d && k[i] == khi[i]) {
      k[i] = klo[i];
      ++i;
    }
    if (i == d) break;
    ++k[i];
  }
  c.constant = static_cast<double>(c.k1 + c.k3) / std::pow(jd, static_cast<double>(d));
  return c;
}

CriticalPoint critical_point(const MongeChart& chart, std::int64_t j, const std::vector<std::int64_t>& k) {
  if (j < 1) throw InvalidQuery("critical_point: j must be positive");
  if (k.size() != chart.dim()) throw InvalidQuery("critical_point: k has the wrong dimension");
  Eigen::VectorXd y(static_cast<Eigen::Index>(k.size()));
  Eigen::VectorXd kv(static_cast<Eigen::Index>(k.size()));
  for (std::size_t i = 0; i < k.size(); ++i) {
    kv(static_cast<Eigen::Index>(i)) = static_cast<double>(k[i]);
    y(static_cast<Eigen::Index>(i)) = static_cast<double>(k[i]) / static_cast<double>(j);
  }
  CriticalPoint cp;
  cp.x = grad_inverse(chart, view(y));
  const double fx = chart.value(view(cp.x));
  cp.f_star = y.dot(cp.x) - fx;
  cp.phase = fx - y.dot(cp.x);
  cp.residual = (static_cast<double>(j) * chart.gradient(view(cp.x)) - kv).norm();
  if (cp.residual > 1e-9 * std::max(1.0, kv.norm())) {
    throw ContractViolation("critical_point: phase gradient does not vanish at the computed point");
  }
  return cp;
}

StationaryPhaseResult stationary_phase_approx(const MongeChart& chart, const Weight& w,
                                              const OscillatoryQuery& query, bool with_quadrature) {
  check_query(chart, w, query);
  const auto cp = critical_point(chart, query.j, query.k);
  if (!chart.contains(view(cp.x))) throw DomainError("stationary_phase_approx: critical point outside the domain");
  const Eigen::MatrixXd h = chart.hessian(view(cp.x));
  StationaryPhaseResult r;
  r.critical_point = cp.x;
  r.Delta = std::abs(h.determinant());
  r.sigma = signature(h);
  r.lambda = static_cast<double>(query.q) * static_cast<double>(query.j);
  const double d = static_cast<double>(chart.dim());
  const double amp = w(view(cp.x)) / std::sqrt(r.Delta) * std::pow(r.lambda, -d / 2.0);
  // The phase is reduced mod 1 in two parts to keep lambda * f* accurate.
  const double lf = r.lambda * cp.f_star;
  r.leading = amp * unit_phase(-(lf - std::floor(lf)) + static_cast<double>(r.sigma) / 8.0);
  r.err_bound_exponent = -(d + 2.0) / 2.0;
  r.error_scale = std::pow(r.lambda, r.err_bound_exponent);
  if (with_quadrature) {
    const auto qv = integral_quadrature(chart, w, query);
    r.value = qv.value;
    r.quad_error = qv.error;
  }
  return r;
}

DecayReport nonstationary_decay(const MongeChart& chart, const Weight& w, const DualGeometry& geometry,
                                std::int64_t j, const std::vector<std::int64_t>& k,
                                const std::vector<std::int64_t>& qs, double quad_tol) {
  if (classify_k(j, k, geometry) != KClass::kK2) throw InvalidQuery("nonstationary_decay: (j, k) is not in K2");
  std::vector<double> y(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) y[i] = static_cast<double>(k[i]) / static_cast<double>(j);
  const double dist = static_cast<double>(j) * geometry.distance_to_v(y);
  DecayReport rep;
  std::vector<double> lx, ly;
  for (std::int64_t q : qs) {
    OscillatoryQuery oq;
    oq.j = j;
    oq.k = k;
    oq.q = q;
    oq.quad_tol = quad_tol;
    const auto v = integral_quadrature(chart, w, oq);
    DecayPoint p;
    p.q = q;
    p.lambda1 = static_cast<double>(q) * dist;
    p.magnitude = std::abs(v.value);
    p.quad_error = v.error;
    p.resolved = p.magnitude > 100.0 * v.error && p.magnitude > 1e-14;
    if (p.resolved) {
      lx.push_back(p.lambda1);
      ly.push_back(p.magnitude);
    }
    rep.points.push_back(p);
  }
  rep.resolved = lx.size();
  if (lx.size() >= 2) {
    const auto g = loglog_fit(lx, ly);
    rep.slope = g.fit.slope;
    rep.slope_stderr = g.fit.slope_stderr;
  }
  rep.passes = rep.resolved >= 3 && rep.slope <= -4.0;
  return rep;
}

Complex weighted_exponential_sum(const MongeChart& chart, const Weight& w, std::int64_t j, std::int64_t q) {
  const Box& box = w.support_box();
  const std::size_t d = box.dim();
  std::vector<std::int64_t> lo(d), hi(d), a(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::tie(lo[i], hi[i]) = box.lattice_range(i, q);
    if (lo[i] > hi[i]) return {};
    a[i] = lo[i];
  }
  const double qd = static_cast<double>(q);
  const double jq = static_cast<double>(j) * qd;
  std::vector<double> x(d);
  CompensatedSum<Complex> sum;
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) x[i] = static_cast<double>(a[i]) / qd;
    const double wx = w(x);
    if (wx != 0.0) sum.add(wx * unit_phase(jq * chart.value(x)));
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (a[i] < hi[i]) {
        ++a[i];
        break;
      }
      a[i] = lo[i];
      if (i == 0) return sum.value();
    }
  }
}

}  // namespace near_misses
