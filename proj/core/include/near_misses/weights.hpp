#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "near_misses/geometry.hpp"

namespace near_misses {

/// Smooth compactly supported w >= 0 on R^d.
class Weight {
 public:
  virtual ~Weight() = default;
  virtual std::size_t dim() const = 0;
  virtual double operator()(std::span<const double> x) const = 0;
  /// Closed box containing the support.
  virtual const Box& support_box() const = 0;
  /// The integral of w, i.e. its Fourier transform at 0.
  virtual double integral() const = 0;
  /// Points on the boundary of {w != 0}.
  virtual std::vector<std::vector<double>> support_boundary(std::size_t count) const = 0;
  virtual std::string describe() const = 0;
};

using WeightPtr = std::shared_ptr<const Weight>;

/// exp(-1 / (1 - |x - c|^2 / R^2)) inside the ball of radius R.
class BumpWeight final : public Weight {
 public:
  BumpWeight(std::vector<double> center, double radius);

  std::size_t dim() const override { return center_.size(); }
  double operator()(std::span<const double> x) const override;
  const Box& support_box() const override { return box_; }
  double integral() const override { return integral_; }
  std::vector<std::vector<double>> support_boundary(std::size_t count) const override;
  std::string describe() const override;

  const std::vector<double>& center() const { return center_; }
  double radius() const { return radius_; }
  /// Estimated absolute error of integral().
  double integral_error() const { return integral_error_; }

 private:
  std::vector<double> center_;
  double radius_;
  Box box_;
  double integral_;
  double integral_error_;
};

/// Tensor product of smooth steps: 1 on [lo, hi], decaying to 0 over a
/// ramp of width r on each side. Integral is exactly prod (hi - lo + r).
class PlateauWeight final : public Weight {
 public:
  PlateauWeight(Box plateau, double ramp);

  std::size_t dim() const override { return plateau_.dim(); }
  double operator()(std::span<const double> x) const override;
  const Box& support_box() const override { return box_; }
  double integral() const override { return integral_; }
  std::vector<std::vector<double>> support_boundary(std::size_t count) const override;
  std::string describe() const override;

 private:
  Box plateau_;
  double ramp_;
  Box box_;
  double integral_;
};

/// Radial bump integral R^d |S^{d-1}| int_0^1 u^{d-1} exp(-1/(1-u^2)) du.
double bump_integral(std::size_t dim, double radius, double* error_estimate = nullptr);

/// Smooth step: 1 for u <= 0, 0 for u >= 1, phi(u) + phi(1-u) = 1.
double smooth_step(double u);

}  // namespace near_misses
