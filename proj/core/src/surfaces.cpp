#include "near_misses/surfaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>

#include "near_misses/error.hpp"

namespace near_misses {

namespace {

Eigen::VectorXd as_vector(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

std::vector<Monomial> squares(std::size_t d, Rational64 coef) {
  std::vector<Monomial> out;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<int> e(d, 0);
    e[i] = 2;
    out.push_back({e, coef});
  }
  return out;
}

std::optional<std::size_t> trailing_int(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  const auto rest = name.substr(prefix.size());
  if (rest.empty()) return std::nullopt;
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
  if (ec != std::errc() || p != rest.data() + rest.size()) return std::nullopt;
  return v;
}

}  // namespace

int default_smoothness_order(std::size_t ambient_dim) {
  const int n = static_cast<int>(ambient_dim);
  return std::max((n - 1) / 2 + 5, n + 1);
}

MongeChart::MongeChart(ChartSpec spec)
    : spec_(spec),
      name_(std::move(spec.name)),
      ambient_dim_(spec.ambient_dim),
      domain_(spec.domain, std::move(spec.cuts)),
      membership_(std::move(spec.membership)),
      value_(std::move(spec.value)),
      gradient_(std::move(spec.gradient)),
      hessian_(std::move(spec.hessian)),
      exact_(std::move(spec.exact)),
      window_(spec.curvature_window),
      fd_step_(std::max(1e-4, 1e-6 * spec.domain.diameter())),
      smoothness_order_(spec.smoothness_order.value_or(default_smoothness_order(spec.ambient_dim))) {
  if (ambient_dim_ < 2) throw InvalidQuery("chart: ambient dimension must be >= 2");
  if (domain_.dim() != ambient_dim_ - 1) throw InvalidQuery("chart: domain dimension must be n-1");
  if (!value_) throw InvalidQuery("chart: missing value function");
}

bool MongeChart::contains(std::span<const double> x) const {
  if (!domain_.contains(x)) return false;
  return !membership_ || membership_(x);
}

bool MongeChart::passes_refinement(std::span<const double> x) const {
  for (const auto& h : domain_.cuts()) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) v += h.normal[i] * x[i];
    if (v > h.offset) return false;
  }
  return !membership_ || membership_(x);
}

Eigen::VectorXd MongeChart::gradient(std::span<const double> x) const {
  return gradient_ ? gradient_(x) : fd_gradient(x);
}

Eigen::MatrixXd MongeChart::hessian(std::span<const double> x) const {
  return hessian_ ? hessian_(x) : fd_hessian(x);
}

Eigen::VectorXd MongeChart::fd_gradient(std::span<const double> x) const {
  const std::size_t d = dim();
  Eigen::VectorXd g(static_cast<Eigen::Index>(d));
  std::vector<double> p(x.begin(), x.end());
  auto at = [&](std::size_t i, double t) {
    p[i] = x[i] + t;
    const double v = value_(p);
    p[i] = x[i];
    return v;
  };
  const double h = fd_step_;
  for (std::size_t i = 0; i < d; ++i) {
    const double num = -at(i, 2.0 * h) + 8.0 * at(i, h) - 8.0 * at(i, -h) + at(i, -2.0 * h);
    g(static_cast<Eigen::Index>(i)) = num / (12.0 * h);
  }
  return g;
}

Eigen::MatrixXd MongeChart::fd_hessian(std::span<const double> x) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd h(d, d);
  std::vector<double> p(x.begin(), x.end());
  auto at = [&](std::size_t i, double t) {
    p[i] = x[i] + t;
    Eigen::VectorXd g = gradient(p);
    p[i] = x[i];
    return g;
  };
  const double s = fd_step_;
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    h.col(i) = (-at(ii, 2.0 * s) + 8.0 * at(ii, s) - 8.0 * at(ii, -s) + at(ii, -2.0 * s)) / (12.0 * s);
  }
  return 0.5 * (h + h.transpose());
}

MongeChart MongeChart::restricted(Box box) const {
  if (box.dim() != dim()) throw InvalidQuery("restricted: dimension mismatch");
  ChartSpec s = spec_;
  s.domain = std::move(box);
  return MongeChart(std::move(s));
}

ChartEvaluation eval(const MongeChart& chart, std::span<const double> x) {
  if (x.size() != chart.dim() || !chart.contains(x)) throw DomainError("eval: point outside chart domain");
  ChartEvaluation e;
  e.value = chart.value(x);
  e.gradient = chart.gradient(x);
  e.hessian = chart.hessian(x);
  return e;
}

std::vector<std::vector<double>> grid_points(const MongeChart& chart, const GridSpec& grid) {
  const Box& box = grid.region ? *grid.region : chart.domain_box();
  const std::size_t d = box.dim();
  if (d != chart.dim()) throw InvalidQuery("grid: dimension mismatch");
  const std::size_t per = std::max<std::size_t>(1, grid.per_axis);
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    std::vector<double> p(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double w = box.hi()[i] - box.lo()[i];
      p[i] = box.lo()[i] + w * (static_cast<double>(idx[i]) + 0.5) / static_cast<double>(per);
    }
    if (chart.contains(p)) out.push_back(std::move(p));
    std::size_t j = 0;
    while (j < d && ++idx[j] == per) idx[j++] = 0;
    if (j == d) break;
  }
  return out;
}

CurvatureReport curvature_window(const MongeChart& chart, const GridSpec& grid) {
  const auto pts = grid_points(chart, grid);
  const double required = std::pow(10.0, static_cast<double>(chart.dim()));
  if (static_cast<double>(pts.size()) < required) {
    throw InvalidQuery("curvature_window: grid must resolve to at least 10^(n-1) points");
  }
  CurvatureReport r;
  r.c1 = std::numeric_limits<double>::infinity();
  r.c2 = 0.0;
  for (const auto& p : pts) {
    const double det = std::abs(chart.hessian(p).determinant());
    if (det < r.c1) {
      r.c1 = det;
      r.argmin = p;
    }
    if (det > r.c2) {
      r.c2 = det;
      r.argmax = p;
    }
  }
  r.points = pts.size();
  r.violation = !(r.c1 > 0.0);
  return r;
}

DiffeoReport check_gradient_diffeo(const MongeChart& chart, const GridSpec& grid) {
  const auto pts = grid_points(chart, grid);
  std::vector<Eigen::VectorXd> grads;
  grads.reserve(pts.size());
  for (const auto& p : pts) grads.push_back(chart.gradient(p));
  DiffeoReport r;
  r.points = pts.size();
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = i + 1; k < pts.size(); ++k) {
      const double dx = (as_vector(pts[i]) - as_vector(pts[k])).norm();
      const double dg = (grads[i] - grads[k]).norm();
      ++r.pairs;
      const double ratio = dg / dx;
      if (ratio <= 1e-9) ++r.collisions;
      r.min_ratio = std::min(r.min_ratio, ratio);
    }
  }
  r.injective = r.collisions == 0;
  return r;
}

DerivativeCheck verify_derivatives(const MongeChart& chart, std::size_t count) {
  const auto d = static_cast<double>(chart.dim());
  GridSpec grid;
  grid.per_axis = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(count), 1.0 / d)));
  const auto pts = grid_points(chart, grid);
  DerivativeCheck c;
  c.h = chart.fd_step();
  c.points = pts.size();
  for (const auto& p : pts) {
    const Eigen::MatrixXd h = chart.hessian(p);
    c.max_asymmetry = std::max(c.max_asymmetry, (h - h.transpose()).cwiseAbs().maxCoeff());
    if (chart.has_closed_gradient()) {
      c.max_gradient_error =
          std::max(c.max_gradient_error, (chart.gradient(p) - chart.fd_gradient(p)).cwiseAbs().maxCoeff());
    }
    if (chart.has_closed_hessian()) {
      c.max_hessian_error = std::max(c.max_hessian_error, (h - chart.fd_hessian(p)).cwiseAbs().maxCoeff());
    }
  }
  return c;
}

MongeChart paraboloid(std::size_t n, std::optional<Box> domain) {
  if (n < 2) throw InvalidQuery("paraboloid: n must be >= 2");
  const std::size_t d = n - 1;
  ChartSpec s;
  s.name = "paraboloid" + std::to_string(n);
  s.ambient_dim = n;
  s.domain = domain ? *domain : Box::cube(d, 0.1, 0.9);
  s.value = [](std::span<const double> x) {
    double v = 0.0;
    for (double t : x) v += t * t;
    return 0.5 * v;
  };
  s.gradient = [](std::span<const double> x) { return as_vector(x); };
  s.hessian = [d](std::span<const double>) {
    return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  };
  s.exact = ExactForm(RationalPolynomial(d, squares(d, {1, 2})), 1);
  s.curvature_window = std::pair{1.0, 1.0};
  return MongeChart(std::move(s));
}

MongeChart parabola(std::optional<Box> domain) {
  ChartSpec s;
  s.name = "parabola";
  s.ambient_dim = 2;
  s.domain = domain ? *domain : Box({0.0}, {1.0}, true);
  s.value = [](std::span<const double> x) { return x[0] * x[0]; };
  s.gradient = [](std::span<const double> x) { return Eigen::VectorXd::Constant(1, 2.0 * x[0]); };
  s.hessian = [](std::span<const double>) { return Eigen::MatrixXd::Constant(1, 1, 2.0); };
  s.exact = ExactForm(RationalPolynomial(1, {{{2}, {1, 1}}}), 1);
  s.curvature_window = std::pair{2.0, 2.0};
  return MongeChart(std::move(s));
}

MongeChart sphere_patch(std::size_t n, double margin, std::optional<Box> domain) {
  if (n < 2) throw InvalidQuery("sphere: n must be >= 2");
  if (!(margin > 0.0 && margin < 1.0)) throw InvalidQuery("sphere: margin must lie in (0, 1)");
  const std::size_t d = n - 1;
  const double half = (1.0 - margin) / std::sqrt(static_cast<double>(d));
  ChartSpec s;
  s.name = n == 2 ? "circle" : "sphere" + std::to_string(n);
  s.ambient_dim = n;
  s.domain = domain ? *domain : Box::cube(d, -half, half);
  s.value = [](std::span<const double> x) {
    double r2 = 0.0;
    for (double t : x) r2 += t * t;
    return std::sqrt(1.0 - r2);
  };
  s.gradient = [](std::span<const double> x) {
    const Eigen::VectorXd v = as_vector(x);
    return Eigen::VectorXd(-v / std::sqrt(1.0 - v.squaredNorm()));
  };
  s.hessian = [d](std::span<const double> x) {
    const Eigen::VectorXd v = as_vector(x);
    const double r = std::sqrt(1.0 - v.squaredNorm());
    const auto dd = static_cast<Eigen::Index>(d);
    return Eigen::MatrixXd(-Eigen::MatrixXd::Identity(dd, dd) / r - v * v.transpose() / (r * r * r));
  };
  std::vector<Monomial> terms = squares(d, {-1, 1});
  terms.push_back({std::vector<int>(d, 0), {1, 1}});
  s.exact = ExactForm(RationalPolynomial(d, std::move(terms)), 2);
  return MongeChart(std::move(s));
}

MongeChart fermat_curve(int m, double margin) {
  if (m < 2) throw InvalidQuery("fermat: exponent must be >= 2");
  if (!(margin > 0.0 && margin < 0.5)) throw InvalidQuery("fermat: margin must lie in (0, 1/2)");
  ChartSpec s;
  s.name = "fermat" + std::to_string(m);
  s.ambient_dim = 2;
  s.domain = Box({margin}, {1.0 - margin});
  const double md = m;
  s.value = [md](std::span<const double> x) { return std::pow(1.0 - std::pow(x[0], md), 1.0 / md); };
  s.gradient = [md](std::span<const double> x) {
    const double g = 1.0 - std::pow(x[0], md);
    return Eigen::VectorXd::Constant(1, -std::pow(x[0], md - 1.0) * std::pow(g, 1.0 / md - 1.0));
  };
  s.hessian = [md](std::span<const double> x) {
    const double g = 1.0 - std::pow(x[0], md);
    return Eigen::MatrixXd::Constant(1, 1, -(md - 1.0) * std::pow(x[0], md - 2.0) * std::pow(g, 1.0 / md - 2.0));
  };
  std::vector<int> e{m};
  s.exact = ExactForm(RationalPolynomial(1, {{{0}, {1, 1}}, {e, {-1, 1}}}), m);
  return MongeChart(std::move(s));
}

MongeChart robert_sargos_surface(double alpha, std::optional<Box> domain) {
  if (alpha == 0.0 || alpha == 1.0) throw InvalidQuery("robert_sargos: alpha must avoid 0 and 1");
  ChartSpec s;
  s.name = "rs";
  s.ambient_dim = 3;
  s.domain = domain ? *domain : Box::cube(2, 1.1, 1.9);
  for (std::size_t i = 0; i < 2; ++i) {
    if (s.domain.lo()[i] < 1.0 || s.domain.hi()[i] > 2.0) throw InvalidQuery("robert_sargos: domain must lie in [1,2]^2");
  }
  const double a = alpha;
  auto g = [a](std::span<const double> x) { return std::pow(x[0], a) + std::pow(x[1], a) - 1.0; };
  s.value = [a, g](std::span<const double> x) { return std::pow(g(x), 1.0 / a); };
  s.gradient = [a, g](std::span<const double> x) {
    const double c = std::pow(g(x), 1.0 / a - 1.0);
    Eigen::VectorXd v(2);
    v << c * std::pow(x[0], a - 1.0), c * std::pow(x[1], a - 1.0);
    return v;
  };
  s.hessian = [a, g](std::span<const double> x) {
    const double gv = g(x);
    const double c2 = (1.0 - a) * std::pow(gv, 1.0 / a - 2.0);
    const double c1 = (a - 1.0) * std::pow(gv, 1.0 / a - 1.0);
    const double p0 = std::pow(x[0], a - 1.0), p1 = std::pow(x[1], a - 1.0);
    Eigen::MatrixXd h(2, 2);
    h(0, 0) = c2 * p0 * p0 + c1 * std::pow(x[0], a - 2.0);
    h(1, 1) = c2 * p1 * p1 + c1 * std::pow(x[1], a - 2.0);
    h(0, 1) = h(1, 0) = c2 * p0 * p1;
    return h;
  };
  return MongeChart(std::move(s));
}

MongeChart polynomial_chart(std::string name, std::size_t ambient_dim, RationalPolynomial radicand, int root,
                            Box domain) {
  if (radicand.dim() + 1 != ambient_dim) throw InvalidQuery("polynomial chart: variable count must be n-1");
  auto form = std::make_shared<const ExactForm>(std::move(radicand), root);
  ChartSpec s;
  s.name = std::move(name);
  s.ambient_dim = ambient_dim;
  s.domain = std::move(domain);
  s.value = [form](std::span<const double> x) { return form->value(x); };
  s.gradient = [form](std::span<const double> x) { return form->gradient(x); };
  s.hessian = [form](std::span<const double> x) { return form->hessian(x); };
  s.exact = *form;
  if (root > 1 && root % 2 == 0) {
    s.membership = [form](std::span<const double> x) { return form->radicand().value(x) > 0.0; };
  }
  return MongeChart(std::move(s));
}

std::vector<SurfaceCatalogEntry> surface_catalog() {
  std::vector<SurfaceCatalogEntry> out;
  out.push_back({"paraboloid2", paraboloid(2), "quadratic model curve |x|^2/2"});
  out.push_back({"paraboloid3", paraboloid(3), "quadratic model surface |x|^2/2, the main-term benchmark"});
  out.push_back({"parabola", parabola(), "y = x^2 on [0,1]; exact points grow linearly"});
  out.push_back({"circle", sphere_patch(2), "unit circle patch; Pythagorean points"});
  out.push_back({"sphere3", sphere_patch(3), "unit sphere patch away from the equator"});
  out.push_back({"fermat4", fermat_curve(4), "quartic Fermat curve; curvature vanishes at x = 0"});
  out.push_back({"rs", robert_sargos_surface(1.5), "(x1^a + x2^a - 1)^(1/a), a = 3/2, on [1.1,1.9]^2"});
  return out;
}

MongeChart builtin_surface(std::string_view name, std::optional<double> margin) {
  if (name == "parabola") return parabola();
  if (name == "paraboloid") return paraboloid(3);
  if (name == "circle") return sphere_patch(2, margin.value_or(0.05));
  if (name == "sphere") return sphere_patch(3, margin.value_or(0.05));
  if (name == "rs") return robert_sargos_surface(1.5);
  if (auto n = trailing_int(name, "paraboloid")) return paraboloid(*n);
  if (auto n = trailing_int(name, "sphere")) return sphere_patch(*n, margin.value_or(0.05));
  if (auto m = trailing_int(name, "fermat")) return fermat_curve(static_cast<int>(*m), margin.value_or(0.05));
  throw InvalidQuery("unknown builtin surface: " + std::string(name));
}

}  // namespace near_misses
