#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace near_misses {

struct Rational64 {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

struct Monomial {
  std::vector<int> exponents;
  Rational64 coef;
};

/// Polynomial in d variables with rational coefficients. Double evaluation
/// with analytic derivatives, plus the integer data needed for exact tests.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  RationalPolynomial(std::size_t dim, std::vector<Monomial> terms);

  std::size_t dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double value(std::span<const double> x) const;
  Eigen::VectorXd gradient(std::span<const double> x) const;
  Eigen::MatrixXd hessian(std::span<const double> x) const;

  /// c * this
  RationalPolynomial scaled(Rational64 c) const;
  RationalPolynomial operator+(const RationalPolynomial& other) const;

 private:
  std::size_t dim_ = 0;
  int degree_ = 0;
  std::vector<Monomial> terms_;
};

/// f = P^{1/m}; m = 1 is a plain polynomial, even m takes the nonnegative root.
class ExactForm {
 public:
  ExactForm() = default;
  ExactForm(RationalPolynomial radicand, int root);

  const RationalPolynomial& radicand() const { return radicand_; }
  int root() const { return root_; }

  double value(std::span<const double> x) const;
  Eigen::VectorXd gradient(std::span<const double> x) const;
  Eigen::MatrixXd hessian(std::span<const double> x) const;

  /// The integer q f(a/q) when it is one, decided in integer arithmetic.
  std::optional<std::int64_t> scaled_integer(std::span<const std::int64_t> a, std::int64_t q) const;

 private:
  RationalPolynomial radicand_;
  int root_ = 1;
  int top_degree_ = 0;
  std::int64_t lcm_den_ = 1;
  std::vector<std::int64_t> int_coef_;
};

}  // namespace near_misses
