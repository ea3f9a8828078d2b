#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace near_misses {

/// p/q approximation of a double, flagged exact when |x - p/q| is at
/// rounding level. Lets lattice enumeration compare a/q against box bounds
/// in integer arithmetic.
struct RationalBound {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool exact = false;
};

RationalBound rational_from_double(double x, std::int64_t max_den = 1'000'000);

/// Axis-aligned box, open by default. `closed` switches every face to inclusive.
class Box {
 public:
  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi, bool closed = false);

  static Box cube(std::size_t dim, double lo, double hi, bool closed = false);

  std::size_t dim() const { return lo_.size(); }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  bool closed() const { return closed_; }

  bool contains(std::span<const double> x) const;
  /// Closure of `inner` lies in the interior of this box.
  bool strictly_contains(const Box& inner) const;

  std::vector<double> center() const;
  double diameter() const;
  double volume() const;
  double min_width() const;
  Box inset(double margin) const;

  /// Inclusive integer range of a with a/q inside the box along `axis`.
  /// Exact when both bounds are rational; otherwise a superset that the
  /// caller must filter with contains().
  std::pair<std::int64_t, std::int64_t> lattice_range(std::size_t axis, std::int64_t q) const;
  bool lattice_range_exact(std::size_t axis) const;

  /// Points on the boundary, roughly `count` of them, including face midpoints.
  std::vector<std::vector<double>> boundary_samples(std::size_t count) const;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  bool closed_ = false;
  std::vector<RationalBound> lo_exact_;
  std::vector<RationalBound> hi_exact_;
};

/// n . x <= offset
struct HalfSpace {
  std::vector<double> normal;
  double offset = 0.0;
};

/// Box intersected with finitely many half-spaces: the convex sets K used by
/// indicator counting and the optional polytope refinement of chart domains.
class ConvexRegion {
 public:
  ConvexRegion() = default;
  explicit ConvexRegion(Box box, std::vector<HalfSpace> cuts = {});

  std::size_t dim() const { return box_.dim(); }
  const Box& bounding_box() const { return box_; }
  const std::vector<HalfSpace>& cuts() const { return cuts_; }
  bool is_box() const { return cuts_.empty(); }

  bool contains(std::span<const double> x) const;

  /// Lebesgue measure: exact for boxes and planar polygons, nested adaptive
  /// quadrature of section areas above two dimensions.
  double volume() const;

 private:
  Box box_;
  std::vector<HalfSpace> cuts_;
};

}  // namespace near_misses
