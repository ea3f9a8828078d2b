#include "near_misses/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "near_misses/error.hpp"
#include "near_misses/quadrature.hpp"

namespace near_misses {

namespace {

__extension__ typedef __int128 i128;

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

// Sutherland-Hodgman clip of a convex polygon by n.x <= c.
using Poly = std::vector<std::pair<double, double>>;

Poly clip(const Poly& poly, double nx, double ny, double c) {
  Poly out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = poly[i];
    const auto& r = poly[(i + 1) % m];
    const double fp = nx * p.first + ny * p.second - c;
    const double fr = nx * r.first + ny * r.second - c;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fr > 0) || (fp > 0 && fr < 0)) {
      const double t = fp / (fp - fr);
      out.emplace_back(p.first + t * (r.first - p.first), p.second + t * (r.second - p.second));
    }
  }
  return out;
}

double polygon_area(const Poly& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& r = poly[(i + 1) % poly.size()];
    twice += p.first * r.second - r.first * p.second;
  }
  return std::abs(twice) / 2.0;
}

double section_volume(const std::vector<double>& lo, const std::vector<double>& hi,
                      const std::vector<HalfSpace>& cuts) {
  const std::size_t d = lo.size();
  if (d == 1) {
    double a = lo[0];
    double b = hi[0];
    for (const auto& h : cuts) {
      const double n = h.normal[0];
      if (n > 0) {
        b = std::min(b, h.offset / n);
      } else if (n < 0) {
        a = std::max(a, h.offset / n);
      } else if (h.offset < 0) {
        return 0.0;
      }
    }
    return std::max(0.0, b - a);
  }
  if (d == 2) {
    Poly poly{{lo[0], lo[1]}, {hi[0], lo[1]}, {hi[0], hi[1]}, {lo[0], hi[1]}};
    for (const auto& h : cuts) {
      poly = clip(poly, h.normal[0], h.normal[1], h.offset);
      if (poly.size() < 3) return 0.0;
    }
    return polygon_area(poly);
  }
  // Integrate the (d-1)-dimensional section measure over the first axis.
  std::vector<double> sub_lo(lo.begin() + 1, lo.end());
  std::vector<double> sub_hi(hi.begin() + 1, hi.end());
  auto section = [&](double t) {
    std::vector<HalfSpace> sub;
    sub.reserve(cuts.size());
    for (const auto& h : cuts) {
      sub.push_back({std::vector<double>(h.normal.begin() + 1, h.normal.end()),
                     h.offset - h.normal[0] * t});
    }
    return section_volume(sub_lo, sub_hi, sub);
  };
  const auto r = integrate_adaptive<double>(section, lo[0], hi[0], 1e-12, 1e-12, 4000, 16);
  return r.value;
}

}  // namespace

RationalBound rational_from_double(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) return {};
  // Continued-fraction convergents.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    if (std::abs(a) > 9e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const i128 p2 = static_cast<i128>(ai) * p1 + p0;
    const i128 q2 = static_cast<i128>(ai) * q1 + q0;
    if (q2 > max_den || std::abs(static_cast<double>(p2)) > 9e15) break;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<std::int64_t>(p2);
    q1 = static_cast<std::int64_t>(q2);
    const double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (approx == x) return {p1, q1, true};
    const double frac = r - a;
    if (frac == 0.0) break;
    r = 1.0 / frac;
  }
  if (q1 > 0 && static_cast<double>(p1) / static_cast<double>(q1) == x) return {p1, q1, true};
  // No short fraction reproduces x: use its exact dyadic value.
  int exp2 = 0;
  const double mant = std::frexp(x, &exp2);
  auto num = static_cast<std::int64_t>(std::ldexp(mant, 53));
  int shift = 53 - exp2;
  while (shift > 0 && num % 2 == 0) {
    num /= 2;
    --shift;
  }
  if (shift < 0 || shift > 62) return {};
  return {num, std::int64_t{1} << shift, true};
}

Box::Box(std::vector<double> lo, std::vector<double> hi, bool closed)
    : lo_(std::move(lo)), hi_(std::move(hi)), closed_(closed) {
  if (lo_.size() != hi_.size() || lo_.empty()) throw InvalidQuery("box: lo/hi dimension mismatch or empty");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] < hi_[i])) throw InvalidQuery("box: empty along an axis");
  }
  lo_exact_.reserve(lo_.size());
  hi_exact_.reserve(hi_.size());
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    lo_exact_.push_back(rational_from_double(lo_[i]));
    hi_exact_.push_back(rational_from_double(hi_[i]));
  }
}

Box Box::cube(std::size_t dim, double lo, double hi, bool closed) {
  return Box(std::vector<double>(dim, lo), std::vector<double>(dim, hi), closed);
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lo_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (closed_) {
      if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    } else if (x[i] <= lo_[i] || x[i] >= hi_[i]) {
      return false;
    }
  }
  return true;
}

bool Box::strictly_contains(const Box& inner) const {
  if (inner.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(inner.lo_[i] > lo_[i] && inner.hi_[i] < hi_[i])) return false;
  }
  return true;
}

std::vector<double> Box::center() const {
  std::vector<double> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lo_[i] + hi_[i]);
  return c;
}

double Box::diameter() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
  return std::sqrt(s);
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= hi_[i] - lo_[i];
  return v;
}

double Box::min_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim(); ++i) w = std::min(w, hi_[i] - lo_[i]);
  return w;
}

Box Box::inset(double margin) const {
  std::vector<double> lo(lo_), hi(hi_);
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] += margin;
    hi[i] -= margin;
  }
  return Box(std::move(lo), std::move(hi), closed_);
}

bool Box::lattice_range_exact(std::size_t axis) const {
  return lo_exact_[axis].exact && hi_exact_[axis].exact;
}

std::pair<std::int64_t, std::int64_t> Box::lattice_range(std::size_t axis, std::int64_t q) const {
  if (lattice_range_exact(axis)) {
    const auto& l = lo_exact_[axis];
    const auto& h = hi_exact_[axis];
    const i128 ln = static_cast<i128>(l.num) * q;
    const i128 hn = static_cast<i128>(h.num) * q;
    i128 a_min, a_max;
    if (closed_) {
      a_min = ceil_div(ln, l.den);
      a_max = floor_div(hn, h.den);
    } else {
      a_min = floor_div(ln, l.den) + 1;
      a_max = ceil_div(hn, h.den) - 1;
    }
    return {static_cast<std::int64_t>(a_min), static_cast<std::int64_t>(a_max)};
  }
  const double qd = static_cast<double>(q);
  return {static_cast<std::int64_t>(std::floor(lo_[axis] * qd)) - 1,
          static_cast<std::int64_t>(std::ceil(hi_[axis] * qd)) + 1};
}

std::vector<std::vector<double>> Box::boundary_samples(std::size_t count) const {
  const std::size_t d = dim();
  std::vector<std::vector<double>> out;
  if (d == 1) {
    out.push_back({lo_[0]});
    out.push_back({hi_[0]});
    return out;
  }
  // Per face a tensor grid with an odd number of points per axis so that
  // face midpoints are always present.
  const std::size_t faces = 2 * d;
  const double per_face = std::max(1.0, static_cast<double>(count) / static_cast<double>(faces));
  auto per_axis = static_cast<std::size_t>(std::ceil(std::pow(per_face, 1.0 / static_cast<double>(d - 1))));
  if (per_axis % 2 == 0) ++per_axis;
  per_axis = std::max<std::size_t>(per_axis, 3);
  for (std::size_t axis = 0; axis < d; ++axis) {
    for (int side = 0; side < 2; ++side) {
      std::vector<std::size_t> idx(d - 1, 0);
      for (;;) {
        std::vector<double> p(d);
        std::size_t k = 0;
        for (std::size_t i = 0; i < d; ++i) {
          if (i == axis) {
            p[i] = side == 0 ? lo_[i] : hi_[i];
          } else {
            const double t = static_cast<double>(idx[k++]) / static_cast<double>(per_axis - 1);
            p[i] = lo_[i] + t * (hi_[i] - lo_[i]);
          }
        }
        out.push_back(std::move(p));
        std::size_t j = 0;
        while (j < idx.size() && ++idx[j] == per_axis) idx[j++] = 0;
        if (j == idx.size()) break;
      }
    }
  }
  return out;
}

ConvexRegion::ConvexRegion(Box box, std::vector<HalfSpace> cuts) : box_(std::move(box)), cuts_(std::move(cuts)) {
  for (const auto& h : cuts_) {
    if (h.normal.size() != box_.dim()) throw InvalidQuery("convex region: half-space dimension mismatch");
  }
}

bool ConvexRegion::contains(std::span<const double> x) const {
  if (!box_.contains(x)) return false;
  for (const auto& h : cuts_) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += h.normal[i] * x[i];
    if (s > h.offset) return false;
  }
  return true;
}

double ConvexRegion::volume() const {
  if (cuts_.empty()) return box_.volume();
  return section_volume(box_.lo(), box_.hi(), cuts_);
}

}  // namespace near_misses
