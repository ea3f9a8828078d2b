#include "near_misses/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "near_misses/error.hpp"

namespace near_misses {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::VectorXd to_vec(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

struct NewtonOutcome {
  bool converged = false;
  Eigen::VectorXd x;
};

NewtonOutcome newton(const MongeChart& chart, const Eigen::VectorXd& y, Eigen::VectorXd x, const NewtonOptions& o) {
  if (!chart.contains(view(x))) return {};
  const double scale = std::max(1.0, y.norm());
  Eigen::VectorXd g = chart.gradient(view(x)) - y;
  double gn = g.norm();
  for (int it = 0; it < o.max_iter; ++it) {
    if (gn <= o.tol * scale) {
      // Two polishing steps, kept only if they do not increase the residual.
      for (int p = 0; p < 2; ++p) {
        const Eigen::VectorXd step = chart.hessian(view(x)).partialPivLu().solve(g);
        const Eigen::VectorXd xn = x - step;
        if (!chart.contains(view(xn))) break;
        const Eigen::VectorXd gnew = chart.gradient(view(xn)) - y;
        if (gnew.norm() > gn) break;
        x = xn;
        g = gnew;
        gn = g.norm();
      }
      return {true, x};
    }
    const Eigen::MatrixXd h = chart.hessian(view(x));
    const Eigen::VectorXd step = h.partialPivLu().solve(g);
    if (!step.allFinite()) return {};
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k <= o.max_halvings; ++k, t *= 0.5) {
      const Eigen::VectorXd xn = x - t * step;
      if (!chart.contains(view(xn))) continue;
      const Eigen::VectorXd gnew = chart.gradient(view(xn)) - y;
      if (!gnew.allFinite()) continue;
      if (gnew.norm() < gn) {
        x = xn;
        g = gnew;
        gn = g.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) return {};
  }
  return {gn <= o.tol * scale, x};
}

std::vector<Eigen::VectorXd> multistart_seeds(const Box& box, int per_axis) {
  const std::size_t d = box.dim();
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(d, 0);
  for (;;) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const double t = (idx[i] + 0.5) / per_axis;
      p(static_cast<Eigen::Index>(i)) = box.lo()[i] + t * (box.hi()[i] - box.lo()[i]);
    }
    out.push_back(p);
    std::size_t j = 0;
    while (j < d && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == d) break;
  }
  return out;
}

Box image_box(const MongeChart& chart) {
  const std::size_t d = chart.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  auto absorb = [&](std::span<const double> x) {
    if (!chart.contains(x)) return;
    const Eigen::VectorXd g = chart.gradient(x);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], g(static_cast<Eigen::Index>(i)));
      hi[i] = std::max(hi[i], g(static_cast<Eigen::Index>(i)));
    }
  };
  GridSpec grid;
  grid.per_axis = d == 1 ? 401 : (d == 2 ? 41 : 9);
  for (const auto& p : grid_points(chart, grid)) absorb(p);
  // Pull boundary samples slightly inside so open domains still evaluate.
  const Box& box = chart.domain_box();
  const auto c = box.center();
  for (auto p : box.boundary_samples(d == 1 ? 2 : 400)) {
    for (std::size_t i = 0; i < d; ++i) p[i] = c[i] + (1.0 - 1e-9) * (p[i] - c[i]);
    absorb(p);
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(lo[i] < hi[i])) throw CurvatureError("dual: gradient image is degenerate");
    const double pad = 1e-6 * (hi[i] - lo[i]);
    lo[i] -= pad;
    hi[i] += pad;
  }
  return Box(std::move(lo), std::move(hi));
}


}  // namespace

int signature(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  int s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 0) ++s;
    if (es.eigenvalues()(i) < 0) --s;
  }
  return s;
}

std::optional<Eigen::VectorXd> try_grad_inverse(const MongeChart& chart, std::span<const double> y,
                                                const NewtonOptions& opts, std::optional<Eigen::VectorXd> hint) {
  if (y.size() != chart.dim()) throw InvalidQuery("grad_inverse: dimension mismatch");
  const Eigen::VectorXd target = to_vec(y);
  if (hint) {
    if (auto r = newton(chart, target, *hint, opts); r.converged) return r.x;
  }
  const auto c = chart.domain_box().center();
  if (auto r = newton(chart, target, to_vec(c), opts); r.converged) return r.x;
  // Multistart: every seed is tried and distinct roots are an injectivity failure.
  std::optional<Eigen::VectorXd> found;
  for (const auto& seed : multistart_seeds(chart.domain_box(), opts.multistart_per_axis)) {
    auto r = newton(chart, target, seed, opts);
    if (!r.converged) continue;
    if (!found) {
      found = r.x;
    } else if ((r.x - *found).norm() > 1e-8 * std::max(1.0, found->norm())) {
      throw CurvatureError("grad_inverse: two distinct preimages; grad f is not injective on the domain");
    }
  }
  return found;
}

Eigen::VectorXd grad_inverse(const MongeChart& chart, std::span<const double> y, const NewtonOptions& opts,
                             std::optional<Eigen::VectorXd> hint) {
  if (!(opts.tol > 0.0)) throw InvalidQuery("grad_inverse: tol must be positive");
  auto r = try_grad_inverse(chart, y, opts, std::move(hint));
  if (!r) throw ConvergenceError("grad_inverse: Newton did not converge; y is outside grad f(D)");
  return *r;
}

DualChart::DualChart(MongeChart base, NewtonOptions opts)
    : base_(std::move(base)), opts_(opts), dual_box_(image_box(base_)) {}

bool DualChart::contains(std::span<const double> y) const {
  return dual_box_.contains(y) && try_grad_inverse(base_, y, opts_).has_value();
}

double DualChart::value(std::span<const double> y) const {
  const Eigen::VectorXd x = grad_inverse(base_, y, opts_);
  return to_vec(y).dot(x) - base_.value(view(x));
}

Eigen::VectorXd DualChart::gradient(std::span<const double> y) const { return grad_inverse(base_, y, opts_); }

Eigen::MatrixXd DualChart::hessian(std::span<const double> y) const {
  const Eigen::VectorXd x = grad_inverse(base_, y, opts_);
  const Eigen::MatrixXd h = base_.hessian(view(x));
  const Eigen::MatrixXd inv = h.inverse();
  return 0.5 * (inv + inv.transpose());
}

MongeChart DualChart::as_chart() const {
  auto self = std::make_shared<const DualChart>(*this);
  ChartSpec s;
  s.name = base_.name() + "*";
  s.ambient_dim = base_.ambient_dim();
  s.domain = dual_box_;
  s.membership = [self](std::span<const double> y) {
    return try_grad_inverse(self->base_, y, self->opts_).has_value();
  };
  s.value = [self](std::span<const double> y) { return self->value(y); };
  s.gradient = [self](std::span<const double> y) { return self->gradient(y); };
  s.hessian = [self](std::span<const double> y) { return self->hessian(y); };
  return MongeChart(std::move(s));
}

DualChart legendre_dual(const MongeChart& chart, const NewtonOptions& opts) {
  const std::size_t d = chart.dim();
  const double required = std::pow(10.0, static_cast<double>(d));
  GridSpec grid;
  grid.per_axis = 10;
  // Dual charts have curved domains inside their box; refine until enough
  // grid points land inside.
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (static_cast<double>(grid_points(chart, grid).size()) >= required) break;
    grid.per_axis = grid.per_axis * 3 / 2;
  }
  const auto window = curvature_window(chart, grid);
  if (window.violation) throw CurvatureError("legendre_dual: curvature window is not strictly positive");
  const auto diffeo = check_gradient_diffeo(chart, grid);
  if (!diffeo.injective) throw CurvatureError("legendre_dual: grad f is not injective on the sampled grid");
  return DualChart(chart, opts);
}

DualityResiduals verify_duality(const MongeChart& chart, std::size_t grid_per_axis) {
  const DualChart dual = legendre_dual(chart);
  const MongeChart dual_chart = dual.as_chart();
  const DualChart bidual(dual_chart);
  GridSpec grid;
  grid.per_axis = grid_per_axis;
  DualityResiduals r;
  bool first = true;
  for (const auto& p : grid_points(chart, grid)) {
    const Eigen::VectorXd x = to_vec(p);
    const Eigen::VectorXd y = chart.gradient(p);
    const double fx = chart.value(p);
    const double fstar = dual.value(view(y));
    r.legendre = std::max(r.legendre, std::abs(fstar - (x.dot(y) - fx)));
    r.involution = std::max(r.involution, std::abs(bidual.value(p) - fx));
    r.gradient_inverse = std::max(r.gradient_inverse, (dual.gradient(view(y)) - x).norm());
    const Eigen::MatrixXd hstar = dual_chart.fd_hessian(view(y));
    const Eigen::MatrixXd h = chart.hessian(p);
    r.reciprocity = std::max(r.reciprocity, std::abs(hstar.determinant() * h.determinant() - 1.0));
    const int sig = signature(hstar);
    if (first) {
      r.signature = sig;
      first = false;
    } else if (sig != r.signature) {
      r.signature_constant = false;
    }
    ++r.points;
  }
  return r;
}

bool DualGeometry::in_v(std::span<const double> y) const {
  auto x = try_grad_inverse(*chart, y);
  return x && (*weight)(view(*x)) > 0.0;
}

double DualGeometry::distance_to_v(std::span<const double> y) const {
  if (in_v(y)) return 0.0;
  const Eigen::VectorXd p = to_vec(y);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : v_boundary) best = std::min(best, (p - b).norm());
  return best;
}

DualGeometry dual_geometry(const MongeChart& chart, WeightPtr w, std::size_t samples) {
  if (!w) throw InvalidQuery("dual_geometry: missing weight");
  if (w->dim() != chart.dim()) throw InvalidQuery("dual_geometry: weight dimension mismatch");
  if (!chart.domain_box().strictly_contains(w->support_box())) {
    throw InvalidQuery("dual_geometry: weight support must lie strictly inside the domain");
  }
  DualGeometry g;
  g.support = w->support_box();
  g.chart = std::make_shared<const MongeChart>(chart);
  g.weight = w;
  const auto per_set = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  for (const auto& p : w->support_boundary(per_set)) g.v_boundary.push_back(chart.gradient(p));
  // Domain boundary points are pulled in by a relative 1e-12 so that
  // open-domain charts can still be evaluated there.
  const Box& box = chart.domain_box();
  const auto c = box.center();
  for (auto p : box.boundary_samples(per_set)) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = c[i] + (1.0 - 1e-12) * (p[i] - c[i]);
    g.r_boundary.push_back(chart.gradient(p));
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& a : g.r_boundary) {
    for (const auto& b : g.v_boundary) dmin = std::min(dmin, (a - b).norm());
  }
  g.rho = 0.5 * dmin;
  auto gap = [](const std::vector<Eigen::VectorXd>& pts) {
    if (pts.size() < 2 || pts.front().size() == 1) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k != i) nearest = std::min(nearest, (pts[i] - pts[k]).norm());
      }
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  g.resolution = std::max(gap(g.v_boundary), gap(g.r_boundary));
  if (!(g.rho > g.resolution)) {
    throw CurvatureError("dual_geometry: rho does not exceed the boundary sampling resolution (degenerate geometry)");
  }
  return g;
}

}  // namespace near_misses
