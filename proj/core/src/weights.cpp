#include "near_misses/weights.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "near_misses/error.hpp"
#include "near_misses/numeric.hpp"
#include "near_misses/quadrature.hpp"

namespace near_misses {

namespace {

double transition(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

Box centred_box(const std::vector<double>& c, double r) {
  std::vector<double> lo(c), hi(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    lo[i] -= r;
    hi[i] += r;
  }
  return Box(std::move(lo), std::move(hi), true);
}

}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = transition(1.0 - u);
  return a / (a + transition(u));
}

double bump_integral(std::size_t dim, double radius, double* error_estimate) {
  if (dim == 0) throw InvalidQuery("bump: dimension must be >= 1");
  const int d = static_cast<int>(dim);
  auto radial = [d](double u) {
    const double s = 1.0 - u * u;
    if (s <= 0.0) return 0.0;
    return std::pow(u, d - 1) * std::exp(-1.0 / s);
  };
  const auto r = integrate_adaptive<double>(radial, 0.0, 1.0, 1e-16, 1e-15, 2000, 8);
  const double sphere = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
  const double scale = std::pow(radius, d) * sphere;
  if (error_estimate) *error_estimate = r.error * scale;
  return r.value * scale;
}

BumpWeight::BumpWeight(std::vector<double> center, double radius)
    : center_(std::move(center)), radius_(radius), box_(centred_box(center_, radius)), integral_(0.0),
      integral_error_(0.0) {
  if (!(radius_ > 0.0)) throw InvalidQuery("bump: radius must be positive");
  integral_ = bump_integral(center_.size(), radius_, &integral_error_);
}

double BumpWeight::operator()(std::span<const double> x) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < center_.size(); ++i) {
    const double t = x[i] - center_[i];
    r2 += t * t;
  }
  const double s = 1.0 - r2 / (radius_ * radius_);
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

std::vector<std::vector<double>> BumpWeight::support_boundary(std::size_t count) const {
  const std::size_t d = dim();
  std::vector<std::vector<double>> out;
  if (d == 1) return {{center_[0] - radius_}, {center_[0] + radius_}};
  if (d == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      out.push_back({center_[0] + radius_ * std::cos(t), center_[1] + radius_ * std::sin(t)});
    }
    return out;
  }
  // Project the boundary of the unit cube onto the sphere.
  for (auto p : Box::cube(d, -1.0, 1.0).boundary_samples(count)) {
    double norm = 0.0;
    for (double t : p) norm += t * t;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i) p[i] = center_[i] + radius_ * p[i] / norm;
    out.push_back(std::move(p));
  }
  return out;
}

std::string BumpWeight::describe() const {
  std::ostringstream s;
  s << "bump(center=[";
  for (std::size_t i = 0; i < center_.size(); ++i) s << (i ? "," : "") << format_double(center_[i]);
  s << "],radius=" << format_double(radius_) << ")";
  return s.str();
}

PlateauWeight::PlateauWeight(Box plateau, double ramp)
    : plateau_(std::move(plateau)), ramp_(ramp), box_(plateau_), integral_(1.0) {
  if (!(ramp_ > 0.0)) throw InvalidQuery("plateau: ramp must be positive");
  std::vector<double> lo(plateau_.lo()), hi(plateau_.hi());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] -= ramp_;
    hi[i] += ramp_;
    integral_ *= plateau_.hi()[i] - plateau_.lo()[i] + ramp_;
  }
  box_ = Box(std::move(lo), std::move(hi), true);
}

double PlateauWeight::operator()(std::span<const double> x) const {
  double v = 1.0;
  for (std::size_t i = 0; i < plateau_.dim() && v != 0.0; ++i) {
    const double t = x[i];
    if (t < plateau_.lo()[i]) {
      v *= smooth_step((plateau_.lo()[i] - t) / ramp_);
    } else if (t > plateau_.hi()[i]) {
      v *= smooth_step((t - plateau_.hi()[i]) / ramp_);
    }
  }
  return v;
}

std::vector<std::vector<double>> PlateauWeight::support_boundary(std::size_t count) const {
  return box_.boundary_samples(count);
}

std::string PlateauWeight::describe() const {
  std::ostringstream s;
  s << "plateau(ramp=" << format_double(ramp_) << ")";
  return s.str();
}

}  // namespace near_misses
